#include "holq/error.hpp"
#include "holq/hypothesis.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace holq;
using C = ModeConstraint;

TEST(Hypothesis, ParsesOneLetterPerMode) {
  const auto h = parse_hypothesis("du i", 3);
  ASSERT_EQ(h.groups.size(), 3u);
  EXPECT_EQ(h.groups[0], (ModeGroup{{0}, C::Diagonal}));
  EXPECT_EQ(h.groups[1], (ModeGroup{{1}, C::Unrestricted}));
  EXPECT_EQ(h.groups[2], (ModeGroup{{2}, C::Identity}));
  EXPECT_EQ(h.to_string(), "d u i");
  EXPECT_EQ(parse_hypothesis("dui", 3), h);
}

TEST(Hypothesis, ParsesMergedGroups) {
  const auto h = parse_hypothesis("(12)u i", 3);
  ASSERT_EQ(h.groups.size(), 2u);
  EXPECT_EQ(h.groups[0], (ModeGroup{{0, 1}, C::Unrestricted}));
  EXPECT_EQ(h.groups[1], (ModeGroup{{2}, C::Identity}));
  EXPECT_EQ(h.to_string(), "(12)u i");
  EXPECT_EQ(parse_hypothesis("(1,2)u i", 3), h);
  EXPECT_EQ(parse_hypothesis(h.to_string(), 3), h);

  // a letter after a group takes the lowest unused mode
  const auto g = parse_hypothesis("(13)d u", 3);
  EXPECT_EQ(g.groups[1], (ModeGroup{{1}, C::Unrestricted}));
  EXPECT_EQ(g.permutation(), (std::vector<std::size_t>{0, 2, 1}));
}

TEST(Hypothesis, ParseErrors) {
  EXPECT_THROW(parse_hypothesis("ux i", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("uu", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("uuuu", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("(1)u uu", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("(12 u i", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("(12)", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("(11)u i", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("(14)u i", 3), ParseError);
  EXPECT_THROW(parse_hypothesis("(02)u i", 3), ParseError);
}

TEST(Hypothesis, ApplyPermutesAndMerges) {
  holq::testing::Rng rng(101);
  const Tensor t = holq::testing::random_tensor({2, 3, 4}, rng);
  const auto same = parse_hypothesis("uu i", 3);
  EXPECT_EQ(same.apply(t), t);

  const auto merged = parse_hypothesis("(12)u i", 3);
  const Tensor m = merged.apply(t);
  EXPECT_EQ(m.shape(), (Shape{6, 4}));
  EXPECT_EQ(m.vec(), t.vec());

  const auto swapped = parse_hypothesis("(21)u i", 3);
  const Tensor s = swapped.apply(t);
  EXPECT_EQ(s.shape(), (Shape{6, 4}));
  // merged index j + 3 i for entry (i, j, k): the first listed mode is fastest
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t i = 0; i < 2; ++i) {
        const std::size_t a[] = {i, j, k};
        const std::size_t b[] = {j + 3 * i, k};
        EXPECT_EQ(t.at(a), s.at(b));
      }
  EXPECT_EQ(swapped.shape(t.shape()), (Shape{6, 4}));
}

TEST(Hypothesis, SeparableHelper) {
  const std::vector<C> cs{C::Diagonal, C::Identity};
  const auto h = separable_hypothesis(cs);
  EXPECT_EQ(h.to_string(), "d i");
  EXPECT_EQ(h.constraints(), cs);
}

TEST(Nesting, SameShapeClassContainment) {
  auto n = [](const char* a, const char* b) {
    return is_nested(parse_hypothesis(a, 3), parse_hypothesis(b, 3));
  };
  EXPECT_TRUE(n("du i", "uu i"));
  EXPECT_TRUE(n("iu i", "du i"));
  EXPECT_TRUE(n("cu i", "uu i"));
  EXPECT_TRUE(n("iu i", "cu i"));
  EXPECT_TRUE(n("uu i", "uu i"));
  EXPECT_FALSE(n("uu i", "du i"));
  EXPECT_FALSE(n("du i", "cu i"));
  EXPECT_FALSE(n("cu i", "du i"));
  EXPECT_FALSE(n("uu u", "uu i"));
}

TEST(Nesting, MergeCase) {
  auto n = [](const char* a, const char* b) {
    return is_nested(parse_hypothesis(a, 3), parse_hypothesis(b, 3));
  };
  EXPECT_TRUE(n("uu i", "(12)u i"));
  EXPECT_TRUE(n("du i", "(12)u i"));
  EXPECT_TRUE(n("dd i", "(12)d i"));
  EXPECT_TRUE(n("di i", "(12)d i"));
  EXPECT_TRUE(n("cc i", "(12)c i"));
  EXPECT_TRUE(n("ii i", "(12)i i"));
  EXPECT_FALSE(n("du i", "(12)d i"));
  EXPECT_FALSE(n("dc i", "(12)c i"));
  // splitting a merged mode is not nested
  EXPECT_FALSE(n("(12)u i", "uu i"));
  EXPECT_FALSE(is_nested(parse_hypothesis("uu", 2), parse_hypothesis("uu i", 3)));
}
