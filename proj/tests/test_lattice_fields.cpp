#include <doctest.h>

#include <cmath>

#include "ncgeo/lattice.hpp"

using namespace ncgeo;

namespace {

FieldConfig random_config(const Lattice& lat, const LieBasisPtr& b, double mass,
                          Rng& rng, double sigma = 0.5) {
  FieldConfig f = FieldConfig::zero(lat, b, mass);
  for (int site = 0; site < lat.sites(); ++site) {
    for (int mu = 0; mu < lat.d; ++mu)
      f.a_at(site, mu) = rng.antihermitian_traceless(b->n, sigma);
    for (int k = 0; k < b->dim(); ++k) f.b_at(site, k) = rng.hermitian(b->n, sigma);
  }
  return f;
}

FieldConfig perturbed_b(const FieldConfig& f, double noise, Rng& rng) {
  FieldConfig out = f;
  for (auto& m : out.b) m += rng.hermitian(f.basis->n, noise);
  return out;
}

// Per-site unitary u(x) = exp(i sigma_3 * amp * sin(2 pi x_1 / L)).
std::vector<Matrix> smooth_gauge(const Lattice& lat, const LieBasisPtr& b,
                                 double amp) {
  std::vector<Matrix> u(lat.sites());
  const double L = lat.sites_per_axis * lat.spacing;
  for (int site = 0; site < lat.sites(); ++site) {
    const int c0 = site % lat.sites_per_axis;
    const double phase = amp * std::sin(2.0 * M_PI * (c0 * lat.spacing) / L);
    Matrix m(2, 2);
    m << std::exp(I * phase), 0.0, 0.0, std::exp(-I * phase);
    u[site] = m;
  }
  return u;
}

}  // namespace

TEST_CASE("curvature components") {
  auto b = build_su_basis(2);
  Lattice lat(2, 4, 0.7);

  SUBCASE("zero fields give zero blocks") {
    const auto c = curvature_components(FieldConfig::zero(lat, b, 1.0));
    for (const auto& m : c.F) CHECK(max_abs(m) == 0.0);
    for (const auto& m : c.Db) CHECK(max_abs(m) == 0.0);
    for (const auto& m : c.V) CHECK(max_abs(m) == 0.0);
  }
  SUBCASE("constant b_k = E_k is a vacuum") {
    const auto c = curvature_components(FieldConfig::constant_b(lat, b, 1.0, 1.0));
    double worst = 0.0;
    for (const auto& m : c.V) worst = std::max(worst, max_abs(m));
    for (const auto& m : c.Db) worst = std::max(worst, max_abs(m));
    CHECK(worst < 1e-13);
  }
  SUBCASE("constant b_k = t E_k leaves only the V block, V = (t^2 - t) C E") {
    const double t = 0.5;
    const auto c = curvature_components(FieldConfig::constant_b(lat, b, 1.0, t));
    for (const auto& m : c.F) CHECK(max_abs(m) == 0.0);
    for (const auto& m : c.Db) CHECK(max_abs(m) < 1e-14);
    int idx = 0;
    for (int k = 0; k < 3; ++k)
      for (int l = k + 1; l < 3; ++l, ++idx) {
        Matrix expect = Matrix::Zero(2, 2);
        for (int m = 0; m < 3; ++m)
          expect += (t * t - t) * b->C[m](k, l) * b->E[m];
        CHECK(max_abs(c.v_at(0, idx) - expect) < 1e-13);
      }
  }
}

TEST_CASE("action values and positivity") {
  auto b = build_su_basis(2);
  Lattice lat(2, 4, 0.7);

  SUBCASE("zero fields and vacua have zero action") {
    CHECK(ymh_action(FieldConfig::zero(lat, b, 1.3)) == 0.0);
    CHECK(ymh_action(FieldConfig::constant_b(lat, b, 1.3, 1.0)) < 1e-24);
  }
  SUBCASE("constant b_k = t sigma_k reproduces volume * 12 m^4 (t^2-t)^2") {
    for (double mass : {1.0, 1.7})
      for (double t : {0.5, 0.25, 0.9, -0.3}) {
        const FieldConfig f = FieldConfig::constant_b(lat, b, mass, t);
        const double m4 = std::pow(mass, 4);
        const double expect =
            lat.volume() * 12.0 * m4 * std::pow(t * t - t, 2);
        CHECK(std::abs(ymh_action(f) - expect) <= 1e-10 * (1.0 + expect));
      }
    // t = 1/2 with unit mass and unit volume factor: 0.75 m^4 vol
    const FieldConfig f = FieldConfig::constant_b(lat, b, 1.0, 0.5);
    CHECK(std::abs(ymh_action(f) - 0.75 * lat.volume()) < 1e-12);
  }
  SUBCASE("action is nonnegative, zero exactly when all blocks vanish") {
    Rng rng(71);
    for (int trial = 0; trial < 5; ++trial) {
      const FieldConfig f = random_config(lat, b, 1.2, rng);
      const double s = ymh_action(f);
      CHECK(s >= 0.0);
      const auto c = curvature_components(f);
      double blocks = 0.0;
      for (const auto& m : c.F) blocks = std::max(blocks, max_abs(m));
      for (const auto& m : c.Db) blocks = std::max(blocks, max_abs(m));
      for (const auto& m : c.V) blocks = std::max(blocks, max_abs(m));
      CHECK(((s <= 1e-10) == (blocks <= 1e-10)));
    }
    // a perturbed vacuum leaves zero strictly
    FieldConfig v = FieldConfig::constant_b(lat, b, 1.0, 1.0);
    v.b_at(0, 0) += 0.05 * b->E[1];
    CHECK(ymh_action(v) > 1e-6);
  }
  SUBCASE("constant fields: action = volume x single-site density") {
    Rng rng(73);
    FieldConfig f = FieldConfig::zero(lat, b, 1.1);
    const Matrix a0 = rng.antihermitian_traceless(2), a1 = rng.antihermitian_traceless(2);
    std::vector<Matrix> bs{rng.hermitian(2), rng.hermitian(2), rng.hermitian(2)};
    for (int site = 0; site < lat.sites(); ++site) {
      f.a_at(site, 0) = a0;
      f.a_at(site, 1) = a1;
      for (int k = 0; k < 3; ++k) f.b_at(site, k) = bs[k];
    }
    Lattice single(2, 2, 0.7);  // same density, different volume
    FieldConfig g = FieldConfig::zero(single, b, 1.1);
    for (int site = 0; site < single.sites(); ++site) {
      g.a_at(site, 0) = a0;
      g.a_at(site, 1) = a1;
      for (int k = 0; k < 3; ++k) g.b_at(site, k) = bs[k];
    }
    CHECK(std::abs(ymh_action(f) / lat.volume() -
                   ymh_action(g) / single.volume()) < 1e-12);
  }
}

TEST_CASE("analytic gradient") {
  auto b = build_su_basis(2);
  Lattice lat(2, 4, 0.8);

  SUBCASE("vanishes at a vacuum") {
    const auto g = action_gradient(FieldConfig::constant_b(lat, b, 1.0, 1.0));
    CHECK(g.norm <= 1e-10);
  }
  SUBCASE("matches central finite differences on random probes") {
    Rng rng(79);
    const double eps = 1e-5;
    for (int probe = 0; probe < 20; ++probe) {
      const FieldConfig f = random_config(lat, b, 1.0 + 0.1 * probe, rng, 0.4);
      const RealVector x = pack_coordinates(f);
      RealVector v(x.size());
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
      v /= v.norm();
      const double plus = ymh_action(unpack_coordinates(f, x + eps * v));
      const double minus = ymh_action(unpack_coordinates(f, x - eps * v));
      const double fd = (plus - minus) / (2.0 * eps);
      const double an = action_gradient(f).coords.dot(v);
      CHECK(std::abs(an - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
  SUBCASE("pure quartic sector matches d/dt of the closed form") {
    const double mass = 1.0, t = 0.7;
    const FieldConfig f = FieldConfig::constant_b(lat, b, mass, t);
    // S(t) = vol * 12 m^4 (t^2 - t)^2, dS/dt = vol * 24 m^4 (t^2-t)(2t-1)
    const double expect = lat.volume() * 24.0 * (t * t - t) * (2.0 * t - 1.0);
    // project the gradient on the direction db_k = E_k at every site
    FieldConfig dir = FieldConfig::zero(lat, b, mass);
    for (int site = 0; site < lat.sites(); ++site)
      for (int k = 0; k < 3; ++k) dir.b_at(site, k) = b->E[k];
    const double got = action_gradient(f).coords.dot(pack_coordinates(dir));
    CHECK(std::abs(got - expect) < 1e-9 * (1.0 + std::abs(expect)));
  }
  SUBCASE("gradient steps preserve the field constraints") {
    Rng rng(83);
    FieldConfig f = random_config(lat, b, 1.0, rng);
    const auto g = action_gradient(f);
    const FieldConfig stepped =
        unpack_coordinates(f, pack_coordinates(f) - 0.1 * g.coords);
    CHECK(stepped.field_constraint_residual() < 1e-12);
    CHECK(g.direction.field_constraint_residual() < 1e-12);
  }
}

TEST_CASE("minimization finds the vacua") {
  auto b = build_su_basis(2);
  Lattice lat(2, 4, 1.0);

  SUBCASE("a vacuum is a fixed point with a constant trace") {
    const FieldConfig vac = FieldConfig::constant_b(lat, b, 1.0, 1.0);
    MinimizeOptions opts;
    opts.action_tol = 1e-10;
    const auto res = minimize(vac, opts);
    CHECK(res.converged);
    CHECK(res.trace.size() == 1);
    CHECK(res.final_action <= 1e-10);
  }
  SUBCASE("b-only descent from 0.9 sigma lands in the spin-1/2 class") {
    Rng rng(89);
    MinimizeOptions opts;
    opts.optimize_a = false;
    opts.max_steps = 5000;
    opts.action_tol = 1e-9;
    const FieldConfig start =
        perturbed_b(FieldConfig::constant_b(lat, b, 1.0, 0.9), 0.01, rng);
    const auto res = minimize(start, opts);
    CHECK(res.converged);
    CHECK(res.final_action <= 1e-8);
    CHECK(res.rep_class == "2");
    // trace is monotone nonincreasing
    for (std::size_t i = 1; i < res.trace.size(); ++i)
      CHECK(res.trace[i].action <= res.trace[i - 1].action + 1e-15);
  }
  SUBCASE("descent from near zero lands in the trivial class") {
    Rng rng(97);
    MinimizeOptions opts;
    opts.optimize_a = false;
    opts.max_steps = 5000;
    opts.action_tol = 1e-9;
    const FieldConfig start =
        perturbed_b(FieldConfig::zero(lat, b, 1.0), 0.01, rng);
    const auto res = minimize(start, opts);
    CHECK(res.converged);
    CHECK(res.final_action <= 1e-8);
    CHECK(res.rep_class == "1+1");
  }
}

TEST_CASE("lattice gauge transformations") {
  auto b = build_su_basis(2);
  Lattice lat(2, 6, 0.5);
  Rng rng(101);

  SUBCASE("identity does nothing") {
    const FieldConfig f = random_config(lat, b, 1.0, rng);
    std::vector<Matrix> u(lat.sites(), Matrix::Identity(2, 2));
    const FieldConfig g = gauge_transform_fields(u, f);
    CHECK(std::abs(ymh_action(g) - ymh_action(f)) < 1e-14);
  }
  SUBCASE("constant gauge invariance is exact") {
    const FieldConfig f = random_config(lat, b, 1.0, rng);
    Matrix expo = 0.7 * I * b->E[2];
    Matrix u0(2, 2);
    u0 << std::exp(I * 0.7), 0.0, 0.0, std::exp(-I * 0.7);
    std::vector<Matrix> u(lat.sites(), u0);
    const double before = ymh_action(f);
    const double after = ymh_action(gauge_transform_fields(u, f));
    CHECK(std::abs(after - before) <= 1e-12 * (1.0 + before));
  }
  SUBCASE("fields stay antihermitean traceless / hermitean") {
    const FieldConfig f = random_config(lat, b, 1.0, rng);
    const FieldConfig g = gauge_transform_fields(smooth_gauge(lat, b, 0.4), f);
    CHECK(g.field_constraint_residual() < 1e-12);
  }
  SUBCASE("smooth gauge deviation shrinks at second order in h") {
    // Same smooth fields and gauge sampled at h and h/2 with fixed volume.
    auto build = [&](int n_sites) {
      Lattice l(2, n_sites, 4.0 / n_sites);
      FieldConfig f = FieldConfig::zero(l, b, 1.0);
      const double L = 4.0;
      for (int site = 0; site < l.sites(); ++site) {
        const int c0 = site % n_sites, c1 = site / n_sites;
        const double x = c0 * l.spacing, y = c1 * l.spacing;
        f.a_at(site, 0) = 0.3 * std::sin(2 * M_PI * x / L) * (I * b->E[0]) +
                          0.2 * std::cos(2 * M_PI * y / L) * (I * b->E[2]);
        f.a_at(site, 1) = 0.25 * std::cos(2 * M_PI * (x + y) / L) * (I * b->E[1]);
        for (int k = 0; k < 3; ++k)
          f.b_at(site, k) =
              (0.8 + 0.1 * std::sin(2 * M_PI * y / L)) * b->E[k];
      }
      return f;
    };
    auto deviation = [&](int n_sites) {
      const FieldConfig f = build(n_sites);
      const auto u = smooth_gauge(f.lattice, b, 0.3);
      return std::abs(ymh_action(gauge_transform_fields(u, f)) - ymh_action(f));
    };
    // Fine enough that the leading h^2 term dominates the deviation.
    const double d1 = deviation(96), d2 = deviation(192);
    CHECK(d1 / d2 >= std::pow(2.0, 1.9));
  }
  SUBCASE("non-unitary input rejected") {
    const FieldConfig f = random_config(lat, b, 1.0, rng);
    std::vector<Matrix> u(lat.sites(), 2.0 * Matrix::Identity(2, 2));
    CHECK_THROWS_AS(gauge_transform_fields(u, f), std::invalid_argument);
  }
}
