#include "checked.hpp"

#include <gtest/gtest.h>

#include <cstdio>

namespace {

// Fails the binary if any logged solver run had an increasing criterion.
class MonotoneEnvironment : public ::testing::Environment {
 public:
  void TearDown() override {
    const auto& log = holq::testing::monotone_log();
    std::printf("criterion monotonicity: %zu runs, %zu violations, worst relative increase %.3g\n",
                log.runs, log.violations, log.worst);
    EXPECT_EQ(log.violations, 0u) << "worst run: " << log.worst_run;
  }
};

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::AddGlobalTestEnvironment(new MonotoneEnvironment);
  return RUN_ALL_TESTS();
}
