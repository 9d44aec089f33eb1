#include <gtest/gtest.h>

#include <bit>
#include <map>
#include <numbers>

#include "oracles.hpp"

using namespace saffine;

namespace {

// Two factorizations of one string over {x, y}, searched over all strings up to max_len.
bool ambiguous_brute_force(const std::string& x, const std::string& y, std::size_t max_len) {
  std::map<std::string, std::vector<std::string>> seen;  // string -> first factor sequence
  std::vector<std::pair<std::string, std::string>> stack{{"", ""}};
  while (!stack.empty()) {
    auto [s, seq] = stack.back();
    stack.pop_back();
    if (!s.empty()) {
      auto [it, fresh] = seen.try_emplace(s, std::vector<std::string>{seq});
      if (!fresh) return true;
    }
    for (const auto& [f, tag] : {std::pair{x, "x"}, std::pair{y, "y"}})
      if (s.size() + f.size() <= max_len) stack.push_back({s + f, seq + tag});
  }
  return false;
}

double growth_by_dp(int l1, int l2, int n) {
  // N(k) = N(k - l1) + N(k - l2), ratio of consecutive normalized counts
  std::vector<long double> c(static_cast<std::size_t>(n) + 1, 0.0L);
  c[0] = 1.0L;
  for (int k = 1; k <= n; ++k) {
    if (k >= l1) c[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(k - l1)];
    if (k >= l2) c[static_cast<std::size_t>(k)] += c[static_cast<std::size_t>(k - l2)];
  }
  // over a full period of lengths to avoid parity effects
  const int span = l1 * l2;
  long double a = 0, b = 0;
  for (int k = n - span; k < n; ++k) a += c[static_cast<std::size_t>(k)];
  for (int k = n - 2 * span; k < n - span; ++k) b += c[static_cast<std::size_t>(k)];
  return static_cast<double>(std::log(a / b) / span);
}

int tm_recursive(int k) { return k == 0 ? 0 : (k % 2 == 0 ? tm_recursive(k / 2) : 1 - tm_recursive(k / 2)); }

}  // namespace

TEST(Unambiguity, PaperExamples) {
  EXPECT_TRUE(is_unambiguous(Word::parse("m"), Word::parse("pp")));
  EXPECT_FALSE(is_unambiguous(Word::parse("mpmp"), Word::parse("mp")));
}

TEST(Unambiguity, AgreesWithBruteForceUpToTwelve) {
  std::vector<std::string> words;
  for (int len = 1; len <= 4; ++len)
    for (int mask = 0; mask < (1 << len); ++mask) {
      std::string s;
      for (int i = 0; i < len; ++i) s += (mask >> i) & 1 ? 'p' : 'm';
      words.push_back(s);
    }
  int checked = 0;
  for (const auto& x : words)
    for (const auto& y : words) {
      if (x == y || x.size() + y.size() > 6) continue;
      const bool sp = is_unambiguous(Word::parse(x), Word::parse(y));
      ASSERT_EQ(sp, !ambiguous_brute_force(x, y, 12)) << x << " " << y;
      ++checked;
    }
  EXPECT_GT(checked, 100);
  EXPECT_EQ(is_unambiguous(Word::parse("mp"), Word::parse("mppm")), !ambiguous_brute_force("mp", "mppm", 12));
}

TEST(Entropy, ClosedForms) {
  EXPECT_NEAR(code_entropy(3, 3), std::log(2.0) / 3, 1e-12);
  EXPECT_NEAR(code_entropy(1, 2), std::log(kGolden), 1e-12);
  EXPECT_NEAR(code_entropy(3, 5), growth_by_dp(3, 5, 3000), 1e-6);
  EXPECT_NEAR(code_entropy(6, 17), growth_by_dp(6, 17, 6000), 1e-6);
  EXPECT_THROW(code_entropy(0, 2), Error);
}

TEST(Entropy, AvoidingTriplesCountsAreFibonacci) {
  // words with no three equal consecutive symbols: 2 F(n+1)
  std::vector<long long> fib{0, 1, 1};
  while (fib.size() < 40) fib.push_back(fib[fib.size() - 1] + fib[fib.size() - 2]);
  for (int n = 1; n <= 30; ++n) {
    // state: (last symbol run length 1 or 2)
    long long run1 = 2, run2 = 0;
    for (int k = 1; k < n; ++k) {
      const long long n1 = run1 + run2, n2 = run1;
      run1 = n1, run2 = n2;
    }
    EXPECT_EQ(run1 + run2, 2 * fib[static_cast<std::size_t>(n + 1)]) << n;
  }
}

TEST(ThueMorse, PrefixAndRecursion) {
  const auto t = thue_morse(1 << 16);
  const std::vector<int> head{0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 1, 0, 1, 1, 0};
  EXPECT_TRUE(std::equal(head.begin(), head.end(), t.begin()));
  for (int k = 0; k < (1 << 16); ++k) {
    ASSERT_EQ(t[static_cast<std::size_t>(k)], tm_recursive(k));
    ASSERT_EQ(t[static_cast<std::size_t>(k)], std::popcount(static_cast<unsigned>(k)) % 2);
  }
}

TEST(KomornikLoreti, ConstantAndResidual) {
  const double b = komornik_loreti();
  EXPECT_GT(b, kGolden);
  EXPECT_LT(b, 2.0);
  EXPECT_NEAR(b, 1.787231650, 1e-8);
  // sum_{n >= 1} t_n x^{-n} = 1 with 200 terms
  double s = 0, pw = 1;
  for (int n = 1; n <= 200; ++n) {
    pw /= b;
    s += tm_recursive(n) * pw;
  }
  EXPECT_LT(std::abs(s - 1.0), 1e-10);
}

TEST(Rauzy, RootAndDimension) {
  const std::complex<double> k = rauzy_kappa();
  EXPECT_LT(std::abs(k * k * k - k * k - k - 1.0), 1e-12);
  EXPECT_GT(k.imag(), 0.0);
  // |kappa|^2 times the real tribonacci root is 1
  double x = 1.8;
  for (int i = 0; i < 60; ++i) x -= (x * x * x - x * x - x - 1) / (3 * x * x - 2 * x - 1);
  EXPECT_NEAR(std::norm(k) * x, 1.0, 1e-12);
  EXPECT_NEAR(-std::log(kGolden) / std::log(std::abs(k)), 1.579354467, 1e-6);
}

TEST(Classification, RationalExamples) {
  const auto a = classify_rational(0.7, 1, 4);
  EXPECT_EQ(a.q_prime, 2);
  EXPECT_NEAR(a.beta, 1 / 0.49, 1e-12);
  EXPECT_EQ(a.cls, UniquenessClass::PositiveDim);
  const auto b = classify_rational(0.9, 1, 4);
  EXPECT_EQ(b.cls, UniquenessClass::FiniteNonEmpty);
  const auto c = classify_rational(0.7, 1, 5);
  EXPECT_EQ(c.q_prime, 5);
  EXPECT_EQ(c.cls, UniquenessClass::PositiveDim);
  EXPECT_THROW(classify_rational(0.7, 2, 4), Error);
}

TEST(Classification, MonotoneInBeta) {
  int last = -1;
  for (double beta = 1.05; beta < 3.0; beta += 0.01) {
    const int cls = static_cast<int>(classify_beta(beta).cls);
    EXPECT_GE(cls, last) << beta;
    last = cls;
  }
  EXPECT_EQ(classify_beta(1.2).cls, UniquenessClass::FiniteNonEmpty);
  EXPECT_EQ(classify_beta(1.7).cls, UniquenessClass::CountablyInfinite);
  EXPECT_EQ(classify_beta(1.9).cls, UniquenessClass::PositiveDim);
  EXPECT_TRUE(classify_beta(komornik_loreti()).boundary);
  EXPECT_TRUE(classify_beta(kGolden).boundary);
}

TEST(Classification, MixedEqual) {
  EXPECT_EQ(classify_mixed_equal(0.6).geometry, MixedEqualGeometry::TotallyDisconnected);
  const auto m = classify_mixed_equal(0.75);
  EXPECT_EQ(m.geometry, MixedEqualGeometry::Parallelogram);
  EXPECT_EQ(m.classification.cls, UniquenessClass::CountablyInfinite);
  const auto edge = classify_mixed_equal(std::sqrt(0.5));
  EXPECT_EQ(edge.geometry, MixedEqualGeometry::Parallelogram);
  EXPECT_EQ(edge.classification.cls, UniquenessClass::PositiveDim);
}

TEST(LemmaConditions, InconclusiveNearUnitModulus) {
  try {
    check_lemma_conditions(SystemSpec::complex(0.95, 0.1), Word::parse("m"), Word::parse("p"), Word::parse("pp"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CannotSeparate);
  }
}

TEST(LemmaConditions, MixedTemplateHasPositiveMargins) {
  const SystemSpec s = SystemSpec::mixed_real(0.55, 0.8);
  const auto margins = check_lemma_conditions(s, Word::parse("mp"), Word::parse("p"), Word::parse("pp"));
  for (double m : margins) EXPECT_GT(m, 0.0);
}

class Certificates : public ::testing::TestWithParam<SystemSpec> {};

TEST_P(Certificates, IssuedAndSoundOnSmallInstances) {
  const SystemSpec s = GetParam();
  const UniquenessCertificate c = certify_uniqueness(s);
  EXPECT_GT(c.entropy, 0.0);
  EXPECT_TRUE(is_unambiguous(c.u + c.v, c.u + c.w));
  EXPECT_NEAR(c.entropy, code_entropy(static_cast<int>((c.u + c.v).size()), static_cast<int>((c.u + c.w).size())), 1e-12);
  std::string why;
  EXPECT_TRUE(verify_certificate(c, &why)) << why;
  EXPECT_EQ(c.dim_lower_bound.has_value(), s.is<Complex>());

  const oracle::CylinderOracle o(s);
  const std::size_t len = 3 * ((c.u + c.v).size() + (c.u + c.w).size());
  std::size_t words = 0;
  EXPECT_TRUE(o.language_is_unique(c.u, c.v, c.w, len, &words)) << c.u.str() << " " << c.v.str() << " " << c.w.str();
  EXPECT_GT(words, 1u);
}

INSTANTIATE_TEST_SUITE_P(Templates, Certificates,
                         ::testing::Values(SystemSpec::mixed_real(0.55, 0.8), SystemSpec::mixed_real(0.8, 0.55),
                                           SystemSpec::jordan(0.7), SystemSpec::complex(rauzy_kappa()),
                                           SystemSpec::complex(0.4, 0.5), SystemSpec::positive_real(0.5, 0.8)));

TEST(Certificates, TightBoundsExhaust) {
  try {
    certify_uniqueness(SystemSpec::mixed_real(0.55, 0.8), SearchBounds{1, 1, 16});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SearchExhausted);
  }
}

TEST(Certificates, TamperedWordsFailVerification) {
  UniquenessCertificate c = certify_uniqueness(SystemSpec::jordan(0.7));
  c.w = c.v;
  EXPECT_FALSE(verify_certificate(c));
}

TEST(SoundnessOracle, RejectsTouchingCylinders) {
  // twin dragon tiles: neighbouring cylinders touch, so nothing can be separated
  const oracle::CylinderOracle o(SystemSpec::complex(0.5, 0.5));
  EXPECT_FALSE(o.language_is_unique(Word::parse("m"), Word::parse("p"), Word::parse("pp"), 12));
}
