// Threshold report for the built-in Example 2 at two transmission scales.
#include <iostream>

#include "ecoepi/ecoepi.hpp"

int main() {
  using namespace ecoepi;
  for (double beta0 : {0.1, 0.8}) {
    const auto rep = classify(example2(beta0));
    std::cout << "beta0 = " << beta0 << '\n' << rep.to_text() << '\n';
  }
}
