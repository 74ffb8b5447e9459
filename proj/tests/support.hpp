#ifndef ERGOGRAPH_TEST_SUPPORT_HPP
#define ERGOGRAPH_TEST_SUPPORT_HPP

#include <string>

#include "ergograph/network.hpp"

inline std::string example_path(const std::string& name) { return std::string(ERGOGRAPH_EXAMPLES_DIR) + "/" + name; }

inline ergograph::ReactionNetwork example(const std::string& name) {
  return ergograph::load_network(example_path(name + ".rn"));
}

#endif
