#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "precarity/app.hpp"

int main(int argc, char** argv) {
  precarity::app::configure_logging();
  return doctest::Context(argc, argv).run();
}
