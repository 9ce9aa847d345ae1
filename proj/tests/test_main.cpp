#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "orl/util/allocator.hpp"

int main(int argc, char** argv) {
  orl::configure_allocator();
  return doctest::Context(argc, argv).run();
}
