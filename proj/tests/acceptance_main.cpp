// Gate binary: runs every verification criterion and prints one pass/fail
// line per criterion. Exit status 0 only when all of them hold.
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "hardytree/acceptance.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = 20260822ull;
  if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);
  hardytree::AcceptanceReport rep = hardytree::run_acceptance(seed, std::cout);
  std::printf("acceptance %s (%zu criteria, seed %llu)\n", rep.all_pass ? "pass" : "FAIL",
              rep.criteria.size(), static_cast<unsigned long long>(seed));
  return rep.all_pass ? 0 : 1;
}
