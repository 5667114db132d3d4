#include "precarity/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "precarity/error.hpp"

namespace precarity {

std::string_view to_string(Outcome o) {
  return o == Outcome::Positive ? "positive" : "negative";
}

std::string_view to_string(MdpAction a) {
  switch (a) {
    case MdpAction::Stay: return "stay";
    case MdpAction::BurnSavings: return "burn_savings";
    case MdpAction::SellHealthAsset: return "sell_health_asset";
    case MdpAction::DropInsurance: return "drop_insurance";
    case MdpAction::SaveToNetWorth: return "save_to_net_worth";
    case MdpAction::BetterHealthPlan: return "better_health_plan";
    case MdpAction::ConsumeMore: return "consume_more";
  }
  return "?";
}

std::array<MdpAction, 3> moves_after(Outcome o) {
  if (o == Outcome::Negative) {
    return {MdpAction::BurnSavings, MdpAction::SellHealthAsset, MdpAction::DropInsurance};
  }
  return {MdpAction::SaveToNetWorth, MdpAction::BetterHealthPlan, MdpAction::ConsumeMore};
}

std::size_t TransitionTable::index(IncomeClass c, Outcome o) {
  return static_cast<std::size_t>(c) * 2 + static_cast<std::size_t>(o);
}

const TransitionRow& TransitionTable::row(IncomeClass c, Outcome o) const {
  return rows_[index(c, o)];
}

void TransitionTable::set_row(IncomeClass c, Outcome o, const TransitionRow& r) {
  rows_[index(c, o)] = r;
}

void TransitionTable::validate() const {
  for (const auto& r : rows_) {
    double sum = 0.0;
    for (double p : r) {
      if (!(p >= 0.0)) throw ConfigError("transition probabilities must be non-negative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ConfigError("transition row sums to " + std::to_string(sum) + ", expected 1");
    }
  }
}

TransitionTable default_transition_table() {
  const TransitionRow volatile_row{1.0 / 9.0, 8.0 / 27.0, 8.0 / 27.0, 8.0 / 27.0};
  const TransitionRow middle_row{0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  const TransitionRow sticky_row{0.55, 0.15, 0.15, 0.15};
  TransitionTable t;
  t.set_row(IncomeClass::Low, Outcome::Negative, volatile_row);
  t.set_row(IncomeClass::Low, Outcome::Positive, sticky_row);
  t.set_row(IncomeClass::Middle, Outcome::Negative, middle_row);
  t.set_row(IncomeClass::Middle, Outcome::Positive, middle_row);
  t.set_row(IncomeClass::High, Outcome::Negative, sticky_row);
  t.set_row(IncomeClass::High, Outcome::Positive, volatile_row);
  return t;
}

MdpAction sample_action(IncomeClass c, Outcome o, const TransitionTable& table, Rng& rng) {
  const TransitionRow& r = table.row(c, o);
  // Two draws every time, so a row change never shifts later draws.
  const double u_move = uniform01(rng);
  const double u_pick = uniform01(rng);
  const double moving = r[1] + r[2] + r[3];
  if (u_move < r[0] || moving <= 0.0) return MdpAction::Stay;
  const auto actions = moves_after(o);
  double acc = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    acc += r[k + 1] / moving;
    if (u_pick < acc) return actions[k];
  }
  // u_pick landed in the rounding gap above the last cumulative sum.
  for (std::size_t k = 3; k-- > 0;) {
    if (r[k + 1] > 0.0) return actions[k];
  }
  return MdpAction::Stay;
}

void apply_action(Household& hh, MdpAction action, double shock_unit) {
  switch (action) {
    case MdpAction::Stay:
      return;
    case MdpAction::BurnSavings:
    case MdpAction::SellHealthAsset:
    case MdpAction::DropInsurance:
      hh.income -= shock_unit;
      break;
    case MdpAction::SaveToNetWorth:
    case MdpAction::BetterHealthPlan:
    case MdpAction::ConsumeMore:
      hh.income += shock_unit;
      break;
  }
  switch (action) {
    case MdpAction::BurnSavings:
      hh.net_worth -= std::max(hh.expenses - hh.disposable_income(), 0.0);
      break;
    case MdpAction::SellHealthAsset:
      hh.health -= 1.0;
      hh.health_adjustment -= 1.0;
      break;
    case MdpAction::DropInsurance:
      hh.health -= 2.0;
      hh.health_adjustment -= 2.0;
      break;
    case MdpAction::SaveToNetWorth:
      hh.net_worth += std::max(hh.disposable_income() - hh.expenses, 0.0);
      break;
    case MdpAction::BetterHealthPlan:
      hh.health += 1.0;
      hh.health_adjustment += 1.0;
      break;
    default:
      break;
  }
}

}  // namespace precarity
