#pragma once

// Bounded-rationality agent: after each decision the household either stays
// put or takes one of three actions, drawn from a per-class, per-outcome row.

#include <array>
#include <string_view>

#include "precarity/population.hpp"
#include "precarity/rng.hpp"

namespace precarity {

enum class Outcome { Negative = 0, Positive = 1 };

enum class MdpAction {
  Stay,
  BurnSavings,
  SellHealthAsset,
  DropInsurance,
  SaveToNetWorth,
  BetterHealthPlan,
  ConsumeMore,
};

std::string_view to_string(Outcome o);
std::string_view to_string(MdpAction a);

/// The three non-Stay actions reachable after an outcome, in row order.
std::array<MdpAction, 3> moves_after(Outcome o);

/// Probabilities (Stay, move 1, move 2, move 3) for one (class, outcome).
using TransitionRow = std::array<double, 4>;

class TransitionTable {
 public:
  const TransitionRow& row(IncomeClass c, Outcome o) const;
  void set_row(IncomeClass c, Outcome o, const TransitionRow& r);
  double stay(IncomeClass c, Outcome o) const { return row(c, o)[0]; }

  /// Rows non-negative and unit-sum within 1e-12.
  void validate() const;

 private:
  static std::size_t index(IncomeClass c, Outcome o);
  std::array<TransitionRow, 6> rows_{};
};

TransitionTable default_transition_table();

MdpAction sample_action(IncomeClass c, Outcome o, const TransitionTable& table, Rng& rng);

/// Applies the side effects of an action. shock_unit is added to (positive
/// actions) or removed from (negative actions) income before the rest.
void apply_action(Household& hh, MdpAction action, double shock_unit);

}  // namespace precarity
