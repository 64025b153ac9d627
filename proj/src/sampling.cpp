#include "knightian/sampling.hpp"

namespace knightian::freestate::sampling {

namespace {

Matrix gaussian(std::mt19937_64& rng, std::size_t d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

DensityMatrix random_density(std::mt19937_64& rng, std::size_t dim) {
  const Matrix g = gaussian(rng, dim);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::validate((rho + rho.adjoint()) / 2.0);
}

Effect random_effect(std::mt19937_64& rng, std::size_t dim) {
  const Matrix g = gaussian(rng, dim);
  Eigen::SelfAdjointEigenSolver<Matrix> es((g + g.adjoint()) / 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd lam(static_cast<Eigen::Index>(dim));
  for (auto& x : lam) x = u(rng);
  const Matrix e = es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
  return Effect::validate((e + e.adjoint()) / 2.0);
}

Freestate random_freestate(std::mt19937_64& rng, std::size_t dim, std::size_t generators) {
  std::vector<DensityMatrix> g;
  for (std::size_t i = 0; i < generators; ++i) g.push_back(random_density(rng, dim));
  return Freestate(std::move(g));
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> w(k);
  double total = 0.0;
  for (auto& x : w) total += (x = ex(rng));
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace knightian::freestate::sampling
