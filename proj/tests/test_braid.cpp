#include <gtest/gtest.h>

#include <deque>
#include <random>
#include <set>
#include <unordered_set>

#include "braidplan/braid.hpp"
#include "oracles.hpp"

using namespace braidplan;
using namespace oracles;

namespace {

const ElementaryBraid s1{1, 1}, S1{1, -1}, s2{2, 1}, S2{2, -1};

BraidWord w3(std::vector<ElementaryBraid> letters) { return BraidWord(3, std::move(letters)); }

}  // namespace

TEST(Laurent, ArithmeticBasics) {
  const auto t = LaurentPoly::monomial(1, 1);
  const auto ti = LaurentPoly::monomial(1, -1);
  EXPECT_EQ(t * ti, LaurentPoly::constant(1));
  EXPECT_TRUE((t - t).is_zero());
  const auto p = t + LaurentPoly::constant(2);
  EXPECT_EQ(p.low_degree(), 0);
  EXPECT_EQ(p.high_degree(), 1);
  EXPECT_EQ(p.coefficient(0), 2);
  EXPECT_EQ((p * p).coefficient(1), 4);
  EXPECT_EQ(LaurentPoly::monomial(0, 5), LaurentPoly{});
}

TEST(Laurent, OverflowIsAnError) {
  const auto big = LaurentPoly::constant(std::numeric_limits<std::int64_t>::max());
  EXPECT_THROW(big + LaurentPoly::constant(1), ArithmeticOverflow);
  EXPECT_THROW(big * LaurentPoly::constant(2), ArithmeticOverflow);
  EXPECT_THROW(-LaurentPoly::constant(std::numeric_limits<std::int64_t>::min()), ArithmeticOverflow);
}

TEST(Burau, IdentityWord) { EXPECT_EQ(burau(BraidWord(3)), LaurentMatrix::identity()); }

TEST(Burau, BraidRelation) {
  EXPECT_EQ(burau(w3({s1, s2, s1})), burau(w3({s2, s1, s2})));
  EXPECT_EQ(burau(w3({S1, S2, S1})), burau(w3({S2, S1, S2})));
  EXPECT_NE(burau(w3({s1, s2})), burau(w3({s2, s1})));
}

TEST(Burau, InverseCancellation) {
  for (auto b : {s1, S1, s2, S2}) EXPECT_EQ(burau(w3({b, b.inverse()})), LaurentMatrix::identity());
  std::mt19937_64 rng(7);
  for (int k = 0; k < 500; ++k) {
    const auto w = random_word(rng, 3, static_cast<std::size_t>(k % 40));
    EXPECT_EQ(burau(w) * burau(w.inverse()), LaurentMatrix::identity());
    EXPECT_EQ(burau(w.concatenated(w.inverse())), LaurentMatrix::identity());
  }
}

TEST(Burau, DeterminantIsAUnit) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const auto w = random_word(rng, 3, 30);
    const auto d = burau(w).determinant();
    EXPECT_TRUE(d.is_unit()) << to_string(w);
    // exponent sum e gives det = (-t)^e
    int e = 0;
    for (auto l : w.letters()) e += l.sign;
    EXPECT_EQ(d, LaurentPoly::monomial(e % 2 == 0 ? 1 : -1, e));
  }
}

TEST(Burau, RewritingEquivalenceImpliesEqualMatrices) {
  std::mt19937_64 rng(11);
  std::size_t checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto seed = random_word(rng, 3, 2 + static_cast<std::size_t>(trial % 9));
    std::string s;
    for (auto l : seed.letters()) s += enc(l);
    const auto expected = burau(seed);
    for (const auto& v : rewrite_class(s, 12, 3000)) {
      ASSERT_EQ(burau(from_chars(v)), expected) << s << " ~ " << v;
      ++checked;
    }
  }
  EXPECT_GT(checked, 20000u);
}

TEST(Burau, FaithfulOnShortWordsAgainstRewriting) {
  // Words of length <= 4 with equal matrices must be rewrite-equivalent: the
  // rewriting closure of every such word reaches the other one.
  std::vector<std::string> words{""};
  for (std::size_t len = 1; len <= 4; ++len) {
    std::vector<std::string> next;
    for (const auto& w : words)
      if (w.size() == len - 1)
        for (char c : std::string("aAbB")) next.push_back(w + c);
    words.insert(words.end(), next.begin(), next.end());
  }
  std::map<std::string, std::string> first;  // matrix text -> representative
  for (const auto& w : words) {
    const auto key = burau(from_chars(w)).to_string();
    auto [it, fresh] = first.emplace(key, w);
    if (fresh) continue;
    const auto cls = rewrite_class(it->second, 8, 20000);
    EXPECT_NE(std::find(cls.begin(), cls.end(), w), cls.end()) << it->second << " vs " << w;
  }
}

TEST(FreeReduce, Examples) {
  EXPECT_TRUE(free_reduce(w3({s1, S1})).is_identity_word());
  EXPECT_TRUE(free_reduce(BraidWord(3)).is_identity_word());
  const auto in = w3({s1, s2, S2, s1});
  EXPECT_EQ(free_reduce(in), w3({s1, s1}));
  EXPECT_EQ(burau(in), burau(w3({s1, s1})));
  EXPECT_EQ(free_reduce(w3({s1, s2, S2, S1, s2})), w3({s2}));
}

TEST(FreeReduce, IdempotentAndImagePreserving) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 1000; ++k) {
    const auto w = random_word(rng, 3, 25);
    const auto r = free_reduce(w);
    EXPECT_EQ(free_reduce(r), r);
    EXPECT_EQ(burau(r), burau(w));
    for (std::size_t p = 0; p + 1 < r.length(); ++p) EXPECT_NE(r.letters()[p + 1], r.letters()[p].inverse());
  }
}

TEST(Forbidden, FourDistinctNonIdentityMatrices) {
  const auto& mats = forbidden_matrices3();
  for (std::size_t a = 0; a < mats.size(); ++a) {
    EXPECT_NE(mats[a], LaurentMatrix::identity());
    for (std::size_t b = a + 1; b < mats.size(); ++b) EXPECT_NE(mats[a], mats[b]);
  }
  std::set<std::string> words;
  for (const auto& w : forbidden_words3()) words.insert(to_string(w));
  EXPECT_EQ(words, (std::set<std::string>{"s1 S2 s1", "s2 S1 s2", "S1 s2 S1", "S2 s1 S2"}));
}

TEST(Forbidden, Examples) {
  EXPECT_TRUE(is_forbidden3(w3({S2, s1, S2})));
  EXPECT_FALSE(is_forbidden3(w3({s1, s2, s1})));
  EXPECT_FALSE(is_forbidden3(BraidWord(3)));
  // equivalent spellings are caught too
  EXPECT_TRUE(is_forbidden3(w3({s2, S2, s1, S2, s1})));
  EXPECT_TRUE(is_forbidden3(w3({s1, s2, s1, S2, S1, S2, S2, s1, S2})));
}

TEST(Braid2, UpdateExamples) {
  auto r = update_check_2braid({}, s1);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.state.exponent_sum, 1);
  r = update_check_2braid(r.state, s1);
  EXPECT_FALSE(r.valid);
  EXPECT_TRUE(r.state.violated);
  EXPECT_EQ(r.state.exponent_sum, 2);
  auto u = update_check_2braid({1, false}, S1);
  EXPECT_TRUE(u.valid);
  EXPECT_EQ(u.state.exponent_sum, 0);
}

TEST(Braid2, Errors) {
  EXPECT_THROW(update_check_2braid({}, s2), InputError);
  EXPECT_THROW(update_check_2braid({2, true}, S1), StickyViolation);
}

TEST(Braid3, UpdateExamples) {
  auto r = update_check_3braid({}, s1);
  EXPECT_TRUE(r.valid);
  EXPECT_EQ(r.state.reduced_word(), w3({s1}));

  auto held = Braid3State::from_word(w3({s1, S2}));
  auto bad = update_check_3braid(held, s1);
  EXPECT_FALSE(bad.valid);
  EXPECT_TRUE(bad.state.violated());
  EXPECT_EQ(bad.state.reduced_word(), w3({s1, S2, s1}));

  auto ok = update_check_3braid(Braid3State::from_word(w3({s1, s2, s1})), S2);
  EXPECT_TRUE(ok.valid);
  EXPECT_EQ(ok.state.canonical_matrix(), burau(w3({s2, s1})));
}

TEST(Braid3, Errors) {
  EXPECT_THROW(update_check_3braid({}, ElementaryBraid{3, 1}), InputError);
  const auto dead = update_check_3braid(Braid3State::from_word(w3({s1, S2})), s1).state;
  EXPECT_THROW(update_check_3braid(dead, s1), StickyViolation);
}

TEST(Braid3, EquivalenceIsMatrixEquality) {
  const auto a = Braid3State::from_word(w3({s1, s2, s1}));
  const auto b = Braid3State::from_word(w3({s2, s1, s2}));
  EXPECT_TRUE(a.equivalent(b));
  EXPECT_FALSE(a == b);  // different spellings
  EXPECT_FALSE(a.equivalent(Braid3State::from_word(w3({s1, s2}))));
}

TEST(IncrementalEqualsBatch, ThreeStrands) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> len(0, 50);
  for (int k = 0; k < 10000; ++k) {
    const auto w = random_word(rng, 3, len(rng));
    // incremental fold
    Braid3State st;
    std::size_t inc_violation = w.length();
    for (std::size_t p = 0; p < w.length(); ++p) {
      auto r = update_check_3braid(st, w.letters()[p]);
      st = r.state;
      if (!r.valid) {
        inc_violation = p;
        break;
      }
    }
    // batch: the raw product of generator images, prefix by prefix
    LaurentMatrix m = LaurentMatrix::identity();
    std::size_t batch_violation = w.length();
    for (std::size_t p = 0; p < w.length(); ++p) {
      m = m * burau_generator(w.letters()[p]);
      if (is_forbidden_matrix3(m)) {
        batch_violation = p;
        break;
      }
    }
    ASSERT_EQ(inc_violation, batch_violation) << to_string(w);
    const auto prefix = w.prefix(std::min(w.length(), inc_violation + 1));
    ASSERT_EQ(st.canonical_matrix(), m);
    if (k % 10 == 0) {
      ASSERT_EQ(st.canonical_matrix(), burau(prefix));
    }
    ASSERT_EQ(st.reduced_word(), free_reduce(prefix));
  }
}

TEST(IncrementalEqualsBatch, TwoStrands) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<std::size_t> len(0, 50);
  for (int k = 0; k < 10000; ++k) {
    const auto w = random_word(rng, 2, len(rng));
    Braid2State st;
    std::size_t inc = w.length();
    for (std::size_t p = 0; p < w.length(); ++p) {
      auto r = update_check_2braid(st, w.letters()[p]);
      st = r.state;
      if (!r.valid) {
        inc = p;
        break;
      }
    }
    std::size_t batch = w.length();
    for (std::size_t p = 0; p < w.length(); ++p) {
      const auto s = Braid2State::from_word(w.prefix(p + 1));
      if (s.violated) {
        batch = p;
        break;
      }
    }
    ASSERT_EQ(inc, batch);
    ASSERT_EQ(st.exponent_sum, Braid2State::from_word(w.prefix(std::min(w.length(), inc + 1))).exponent_sum);
  }
}

TEST(Text, RoundTrip) {
  EXPECT_EQ(to_string(BraidWord(3)), "e");
  EXPECT_EQ(to_string(w3({s1, S2, s1})), "s1 S2 s1");
  EXPECT_EQ(parse_word("s1 S2 s1", 3), w3({s1, S2, s1}));
  EXPECT_EQ(parse_word("e", 3), BraidWord(3));
  EXPECT_THROW(parse_word("s3", 3), InputError);
  EXPECT_THROW(parse_word("x1", 3), InputError);
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const auto w = random_word(rng, 3, 12);
    EXPECT_EQ(parse_word(to_string(w), 3), w);
  }
}

TEST(Word, AppendRejectsBadIndex) {
  BraidWord w(3);
  EXPECT_THROW(w.append({3, 1}), InputError);
  EXPECT_THROW(w.append({0, 1}), InputError);
  EXPECT_THROW(BraidWord(1), InputError);
}

TEST(Table, CombinationRanksAreBijective) {
  const int n = 9;
  std::set<std::size_t> pr, tr;
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) pr.insert(pair_rank(i, j));
  for (int k = 2; k < n; ++k)
    for (int j = 1; j < k; ++j)
      for (int i = 0; i < j; ++i) tr.insert(triplet_rank(i, j, k));
  EXPECT_EQ(pr.size(), pair_count(n));
  EXPECT_EQ(*pr.rbegin() + 1, pair_count(n));
  EXPECT_EQ(tr.size(), triplet_count(n));
  EXPECT_EQ(*tr.rbegin() + 1, triplet_count(n));
}

TEST(Table, SlotsAreIndependent) {
  BraidTable t(5, 2);
  t.pair(1, 0, 3).exponent_sum = 1;
  t.triplet(0, 1, 2, 4) = Braid3State::from_word(w3({s2}));
  EXPECT_EQ(t.pair(0, 0, 3).exponent_sum, 0);
  EXPECT_EQ(t.pair(1, 0, 3).exponent_sum, 1);
  EXPECT_EQ(t.triplet(1, 1, 2, 4), Braid3State{});
  EXPECT_FALSE(t.any_violated());
  EXPECT_THROW(t.pair(0, 3, 3), InputError);
  EXPECT_THROW(t.pair(2, 0, 1), InputError);
}
