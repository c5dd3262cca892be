#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "evid/evidential_core.hpp"
#include "oracles.hpp"

using evid::DirichletPrediction;
using evid::Matrix;
using evid::Vector;

namespace {

Matrix mat(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : rows) {
    Eigen::Index c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST_CASE("DirichletPrediction validates its input") {
  CHECK_THROWS_AS(DirichletPrediction({1.0}), std::invalid_argument);
  CHECK_THROWS_AS(DirichletPrediction({1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(DirichletPrediction({1.0, -2.0}), std::domain_error);
  CHECK_THROWS_AS(DirichletPrediction({1.0, std::nan("")}), std::domain_error);
  const DirichletPrediction p({2.0, 3.0, 5.0});
  CHECK(p.num_classes() == 3);
  CHECK(p.strength() == 10.0);
}

TEST_CASE("external alpha is floored but zero is rejected") {
  const auto p = DirichletPrediction::from_external({1e-12, 2.0});
  CHECK(p.alpha(0) == evid::kAlphaFloor);
  CHECK_THROWS_AS(DirichletPrediction::from_external({0.0, 1.0}), std::domain_error);
}

TEST_CASE("mean_probabilities") {
  CHECK(evid::mean_probabilities({1, 1}).isApprox(Vector::Constant(2, 0.5)));
  const Vector m = evid::mean_probabilities({2, 3, 5});
  CHECK(m[0] == doctest::Approx(0.2));
  CHECK(m[1] == doctest::Approx(0.3));
  CHECK(m[2] == doctest::Approx(0.5));
  const Vector b = evid::mean_probabilities({3, 1});
  CHECK(b[0] == 0.75);
  CHECK(b[1] == 0.25);
  CHECK(std::abs(m.sum() - 1.0) < 1e-12);
}

TEST_CASE("predict_class takes the max with lowest-index ties") {
  CHECK(evid::predict_class({2, 3, 5}) == 2);
  CHECK(evid::predict_class({2, 2}) == 0);
  CHECK(evid::predict_class({10, 1}) == 0);
  CHECK(evid::predict_class({1, 4, 4, 2}) == 1);
}

TEST_CASE("covariance_bundle for a symmetric binary Dirichlet") {
  const auto cov = evid::covariance_bundle({1, 1});
  const Matrix expected = mat({{0.25, -0.25}, {-0.25, 0.25}});
  CHECK((cov.total - expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((cov.aleatoric - (2.0 / 3.0) * expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((cov.epistemic - (1.0 / 3.0) * expected).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(cov.correlation(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("covariance_bundle for alpha = (2, 3, 5)") {
  // Values confirmed by the bi-level Monte-Carlo oracle below.
  const auto cov = evid::covariance_bundle({2, 3, 5});
  const Matrix expected = mat({{0.16, -0.06, -0.10}, {-0.06, 0.21, -0.15}, {-0.10, -0.15, 0.25}});
  CHECK((cov.total - expected).cwiseAbs().maxCoeff() < 1e-15);

  const auto mc = evid::oracle::monte_carlo_covariance(Vector{{2.0, 3.0, 5.0}}, 200000, 11);
  for (Eigen::Index i = 0; i < 3; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      CAPTURE(i);
      CAPTURE(j);
      CHECK(std::abs(mc.total(i, j) - expected(i, j)) <= 4.0 * mc.total_se(i, j));
    }
  }
}

TEST_CASE("binary correlation is always -1") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    const Vector a = evid::oracle::random_alpha(rng, 2, 0.1, 100.0);
    CHECK(evid::covariance_bundle(DirichletPrediction(a)).correlation(0, 1) == doctest::Approx(-1.0));
  }
}

TEST_CASE("class_uncertainties") {
  const auto u = evid::class_uncertainties({3, 1});
  CHECK(u.total[0] == doctest::Approx(0.1875));
  CHECK(u.total[1] == doctest::Approx(0.1875));
  CHECK(u.aleatoric[0] == doctest::Approx(0.15));
  CHECK(u.epistemic[1] == doctest::Approx(0.0375));
  CHECK(evid::class_uncertainties({1, 1}).total.isApprox(Vector::Constant(2, 0.25)));
  const auto peaked = evid::class_uncertainties({1e9, 1.0});
  CHECK(peaked.total.maxCoeff() < 1e-8);
}

TEST_CASE("sample_uncertainty_variance") {
  const auto a = evid::sample_uncertainty_variance({1, 1});
  CHECK(a.sample_total == doctest::Approx(0.5));
  CHECK(a.sample_aleatoric == doctest::Approx(1.0 / 3.0));
  CHECK(a.sample_epistemic == doctest::Approx(1.0 / 6.0));
  const auto b = evid::sample_uncertainty_variance({3, 1});
  CHECK(b.sample_total == doctest::Approx(0.375));
  CHECK(b.sample_aleatoric == doctest::Approx(0.3));
  CHECK(b.sample_epistemic == doctest::Approx(0.075));
  CHECK(evid::sample_uncertainty_variance({2, 3, 5}).sample_total == doctest::Approx(0.62));
}

TEST_CASE("sample_uncertainty_entropy") {
  const auto a = evid::sample_uncertainty_entropy({1, 1});
  CHECK(std::abs(a.sample_total - std::log(2.0)) < 1e-12);
  CHECK(std::abs(a.sample_aleatoric - 0.5) < 1e-12);
  CHECK(std::abs(a.sample_epistemic - (std::log(2.0) - 0.5)) < 1e-12);
  CHECK(a.class_total.size() == 0);

  const auto b = evid::sample_uncertainty_entropy({3, 1});
  const double u = -(0.75 * std::log(0.75) + 0.25 * std::log(0.25));
  const double alea = 0.75 * 0.25 + 0.25 * (0.5 + 1.0 / 3.0 + 0.25);
  CHECK(std::abs(b.sample_total - u) < 1e-12);
  CHECK(std::abs(b.sample_aleatoric - alea) < 1e-12);
  CHECK(b.sample_total == doctest::Approx(0.5623351).epsilon(1e-7));
  CHECK(b.sample_aleatoric == doctest::Approx(0.4583333).epsilon(1e-7));
  CHECK(b.sample_epistemic == doctest::Approx(0.1040018).epsilon(1e-6));

  const auto c = evid::sample_uncertainty_entropy({1e8, 1.0, 1.0});
  CHECK(c.sample_total < 1e-6);
  CHECK(c.sample_aleatoric < 1e-6);
  CHECK(std::abs(c.sample_epistemic) < 1e-6);
}

TEST_CASE("covariance invariants over random alpha") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> classes(2, 20);
  for (int k = 0; k < 300; ++k) {
    const DirichletPrediction p(evid::oracle::random_alpha(rng, classes(rng), 0.1, 100.0));
    const auto cov = evid::covariance_bundle(p);
    const double a0 = p.strength();
    for (const Matrix* m : {&cov.total, &cov.aleatoric, &cov.epistemic}) {
      CHECK((*m - m->transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK(m->rowwise().sum().cwiseAbs().maxCoeff() <= 1e-10);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(*m);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    }
    CHECK((cov.total - cov.aleatoric - cov.epistemic).cwiseAbs().maxCoeff() <= 1e-12);
    for (Eigen::Index i = 0; i < cov.total.rows(); ++i) {
      CHECK(cov.correlation(i, i) == 1.0);
      for (Eigen::Index j = 0; j < cov.total.cols(); ++j) {
        if (cov.total(i, j) == 0.0) continue;
        CHECK(std::abs(cov.aleatoric(i, j) / cov.epistemic(i, j) - a0) <= 1e-10 * a0);
        CHECK(std::abs(cov.correlation(i, j)) <= 1.0);
      }
    }
    const auto var = evid::sample_uncertainty_variance(p);
    CHECK(std::abs(var.sample_total - cov.total.trace()) <= 1e-12);
    CHECK(std::abs(var.sample_aleatoric - cov.aleatoric.trace()) <= 1e-12);
    CHECK(std::abs(var.sample_epistemic - cov.epistemic.trace()) <= 1e-12);
    CHECK(std::abs(var.sample_total - var.class_total.sum()) <= 1e-12);
    CHECK(std::abs(var.sample_total - var.sample_aleatoric - var.sample_epistemic) <= 1e-10);

    const auto ent = evid::sample_uncertainty_entropy(p);
    CHECK(ent.sample_aleatoric >= -1e-10);
    CHECK(ent.sample_epistemic >= -1e-10);
    CHECK(std::abs(ent.sample_total - ent.sample_aleatoric - ent.sample_epistemic) <= 1e-10);
  }
}

TEST_CASE("correlation guard zeroes degenerate classes") {
  // alpha_1 tiny: class 1 variance is below the guard.
  const auto cov = evid::covariance_bundle({1e15, 1e-9, 1e15});
  CHECK(cov.correlation(1, 1) == 1.0);
  CHECK(cov.correlation(0, 1) == 0.0);
  CHECK(cov.correlation(1, 2) == 0.0);
  CHECK(cov.correlation.allFinite());
}

TEST_CASE("argmax is scale invariant but the uncertainty split is not") {
  const DirichletPrediction p({2, 7, 3});
  const DirichletPrediction q(Vector(p.alpha() * 40.0));
  CHECK(evid::predict_class(p) == evid::predict_class(q));
  const auto up = evid::sample_uncertainty_variance(p);
  const auto uq = evid::sample_uncertainty_variance(q);
  CHECK(up.sample_total == doctest::Approx(uq.sample_total));
  CHECK(up.sample_epistemic > 10.0 * uq.sample_epistemic);
}

TEST_CASE("quant mode parsing") {
  CHECK(evid::parse_quant_mode("variance") == evid::QuantMode::variance);
  CHECK(evid::parse_quant_mode("entropy") == evid::QuantMode::entropy);
  CHECK_THROWS_AS(evid::parse_quant_mode("softmax"), std::invalid_argument);
}
