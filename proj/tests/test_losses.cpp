#include "torch_doctest.hpp"

#include <cmath>

#include "msabn/core/errors.hpp"
#include "msabn/losses/losses.hpp"

using namespace msabn;
using namespace msabn::losses;

TEST_SUITE("losses") {
  TEST_CASE("weighted cross-entropy against a hand computation") {
    const auto logits = torch::tensor({{1.0, 0.0}}, torch::kDouble);
    const auto labels = torch::tensor({1}, torch::kLong);
    const auto w = torch::tensor({0.667, 2.0}, torch::kDouble);
    // -log(e^0 / (e^1 + e^0)) = log(1 + e) = 1.3132617; times the label weight 2.0.
    const double by_hand = 2.0 * std::log(1.0 + std::exp(1.0));
    CHECK(by_hand == doctest::Approx(2.6265234).epsilon(1e-7));
    CHECK(cross_entropy(logits, labels, w).item<double>() == doctest::Approx(by_hand).epsilon(1e-12));
    CHECK(cross_entropy(logits, labels).item<double>() == doctest::Approx(1.3132617).epsilon(1e-7));
  }

  TEST_CASE("uniform weights equal unweighted cross-entropy") {
    torch::manual_seed(1);
    const auto logits = torch::randn({16, 5}, torch::kDouble);
    const auto labels = torch::randint(0, 5, {16}, torch::kLong);
    const auto plain = cross_entropy(logits, labels).item<double>();
    CHECK(cross_entropy(logits, labels, torch::ones({5}, torch::kDouble)).item<double>() ==
          doctest::Approx(plain).epsilon(1e-15));
    const auto ref = torch::nn::functional::cross_entropy(logits, labels).item<double>();
    CHECK(plain == doctest::Approx(ref).epsilon(1e-12));
  }

  TEST_CASE("additivity") {
    LossTerms t{torch::tensor(0.5, torch::kDouble), torch::tensor(0.3, torch::kDouble),
                torch::tensor(0.2, torch::kDouble), {}};
    const auto r = t.report();
    CHECK(r.total == doctest::Approx(1.0).epsilon(1e-15));
    torch::manual_seed(3);
    for (int i = 0; i < 20; ++i) {
      const auto a = torch::randn({8, 4}, torch::kDouble), c = torch::randn({8, 4}, torch::kDouble);
      const auto y = torch::randint(0, 4, {8}, torch::kLong);
      const auto re = torch::rand({}, torch::kDouble);
      const auto terms = total_loss(a, c, y, std::nullopt, re);
      const auto rep = terms.report();
      CHECK(terms.total.item<double>() == rep.l_attn + rep.l_cls + *rep.l_re);
      CHECK(rep.l_attn >= 0.0);
      CHECK(rep.l_cls >= 0.0);
      const auto no_re = total_loss(a, c, y).report();
      CHECK_FALSE(no_re.l_re);
      CHECK(no_re.total == no_re.l_attn + no_re.l_cls);
    }
  }

  TEST_CASE("confident correct logits drive both terms to zero") {
    const auto labels = torch::tensor({0, 2}, torch::kLong);
    auto logits = torch::full({2, 3}, -1e3, torch::kDouble);
    logits.index_put_({0, 0}, 1e3);
    logits.index_put_({1, 2}, 1e3);
    const auto r = total_loss(logits, logits, labels).report();
    CHECK(r.l_attn < 1e-12);
    CHECK(r.l_cls < 1e-12);
  }

  TEST_CASE("non-finite logits name the branch") {
    const auto labels = torch::tensor({0}, torch::kLong);
    const auto ok = torch::zeros({1, 2});
    auto bad = torch::zeros({1, 2});
    bad.index_put_({0, 1}, std::nan(""));
    try {
      total_loss(bad, ok, labels);
      FAIL("expected an error");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("attention") != std::string::npos);
    }
    try {
      total_loss(ok, bad, labels);
      FAIL("expected an error");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("perception") != std::string::npos);
    }
  }
}
