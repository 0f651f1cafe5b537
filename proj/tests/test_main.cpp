#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"

#include "mdlab/parallel.hpp"

int main(int argc, char** argv) {
  mdlab::init_threads();
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
