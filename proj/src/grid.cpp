#include "kakinuma/grid.hpp"
#include "kakinuma/errors.hpp"

#include <cmath>
#include <string>

namespace kakinuma {

namespace {

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

// Basis values on the lattice x_j = j L / P, phases reduced exactly.
void fill_basis(Mat& E, int P, int M, double L) {
    const int n = M - 1;
    E.resize(P, n);
    const double c0 = 1.0 / std::sqrt(L);
    const double c1 = std::sqrt(2.0 / L);
    for (int j = 0; j < P; ++j) {
        E(j, 0) = c0;
        for (int k = 1; k < M / 2; ++k) {
            const long long r = (static_cast<long long>(k) * j) % P;
            const double ph = 2.0 * std::numbers::pi * static_cast<double>(r) / P;
            E(j, 2 * k - 1) = c1 * std::cos(ph);
            E(j, 2 * k) = c1 * std::sin(ph);
        }
    }
}

}  // namespace

PeriodicGrid::PeriodicGrid(int M, double length) : M_(M), Mp_(3 * M / 2), L_(length) {
    if (!is_power_of_two(M) || M < 16)
        throw ConstraintViolation("grid size M must be a power of two and at least 16, got " +
                                  std::to_string(M));
    if (!(length > 0.0)) throw ConstraintViolation("grid length must be positive");
    xi1_ = 2.0 * std::numbers::pi / L_;
    fill_basis(E_, M_, M_, L_);
    fill_basis(Ep_, Mp_, M_, L_);
    cosq_.resize(Mp_, M_ - 1);
    sinq_.resize(Mp_, M_ - 1);
    for (int j = 0; j < Mp_; ++j) {
        for (int q = 0; q < M_ - 1; ++q) {
            // reduce the phase exactly on the padded lattice
            const long long r = (static_cast<long long>(q) * j) % Mp_;
            const double ph = 2.0 * std::numbers::pi * static_cast<double>(r) / Mp_;
            cosq_(j, q) = std::cos(ph);
            sinq_(j, q) = std::sin(ph);
        }
    }
}

Vec PeriodicGrid::nodes() const {
    Vec x(M_);
    for (int j = 0; j < M_; ++j) x(j) = node(j);
    return x;
}

Vec PeriodicGrid::padded_nodes() const {
    Vec x(Mp_);
    for (int j = 0; j < Mp_; ++j) x(j) = j * L_ / Mp_;
    return x;
}

double PeriodicGrid::wavenumber(int idx) const {
    if (idx == 0) return 0.0;
    return ((idx + 1) / 2) * xi1_;
}

Vec PeriodicGrid::to_modes(const Vec& values) const { return (L_ / M_) * (E_.transpose() * values); }
Vec PeriodicGrid::to_values(const Vec& modes) const { return E_ * modes; }
Mat PeriodicGrid::to_modes(const Mat& values) const { return (L_ / M_) * (E_.transpose() * values); }
Mat PeriodicGrid::to_values(const Mat& modes) const { return E_ * modes; }
Vec PeriodicGrid::to_padded(const Vec& modes) const { return Ep_ * modes; }
Vec PeriodicGrid::from_padded(const Vec& pv) const { return (L_ / Mp_) * (Ep_.transpose() * pv); }

Mat PeriodicGrid::galerkin(const Vec& a) const {
    const int n = modes();
    const int K = M_ / 2 - 1;
    const double w = L_ / Mp_;
    const Vec Ac = w * (cosq_.transpose() * a);
    const Vec As = w * (sinq_.transpose() * a);
    auto as = [&](int q) { return q >= 0 ? As(q) : -As(-q); };
    Mat G(n, n);
    const double invL = 1.0 / L_;
    const double r2 = std::sqrt(2.0) * invL;
    G(0, 0) = Ac(0) * invL;
    for (int k = 1; k <= K; ++k) {
        G(0, 2 * k - 1) = G(2 * k - 1, 0) = r2 * Ac(k);
        G(0, 2 * k) = G(2 * k, 0) = r2 * As(k);
    }
    for (int k = 1; k <= K; ++k) {
        for (int m = 1; m <= K; ++m) {
            const double cm = Ac(std::abs(k - m)), cp = Ac(k + m);
            G(2 * k - 1, 2 * m - 1) = (cm + cp) * invL;
            G(2 * k, 2 * m) = (cm - cp) * invL;
            G(2 * k - 1, 2 * m) = (as(k + m) + as(m - k)) * invL;
            G(2 * k, 2 * m - 1) = (as(k + m) + as(k - m)) * invL;
        }
    }
    return G;
}

Vec PeriodicGrid::d_modes(const Vec& f) const {
    Vec out = Vec::Zero(f.size());
    for (int k = 1; k < M_ / 2; ++k) {
        const double kap = k * xi1_;
        out(2 * k - 1) = kap * f(2 * k);
        out(2 * k) = -kap * f(2 * k - 1);
    }
    return out;
}

Mat PeriodicGrid::d_left(const Mat& X) const {
    Mat out = Mat::Zero(X.rows(), X.cols());
    for (int k = 1; k < M_ / 2; ++k) {
        const double kap = k * xi1_;
        out.row(2 * k - 1) = kap * X.row(2 * k);
        out.row(2 * k) = -kap * X.row(2 * k - 1);
    }
    return out;
}

Mat PeriodicGrid::d_right(const Mat& X) const {
    Mat out = Mat::Zero(X.rows(), X.cols());
    for (int k = 1; k < M_ / 2; ++k) {
        const double kap = k * xi1_;
        out.col(2 * k - 1) = -kap * X.col(2 * k);
        out.col(2 * k) = kap * X.col(2 * k - 1);
    }
    return out;
}

Mat PeriodicGrid::d_matrix() const { return d_left(Mat::Identity(modes(), modes())); }

Vec PeriodicGrid::product(const Vec& f, const Vec& g) const {
    const Vec fp = padded_from_values(f);
    const Vec gp = padded_from_values(g);
    return to_values(from_padded(fp.cwiseProduct(gp)));
}

double PeriodicGrid::integrate(const Vec& values) const { return values.sum() * L_ / M_; }

ScalarField deriv(const PeriodicGrid& g, const ScalarField& f, int order) {
    Vec m = g.to_modes(f);
    for (int i = 0; i < order; ++i) m = g.d_modes(m);
    return g.to_values(m);
}

ScalarField inverse_laplacian(const PeriodicGrid& g, const ScalarField& f, double tol) {
    const double mu = g.mean(f);
    if (std::abs(mu) > tol) throw NonZeroMean("inverse Laplacian needs a mean-free field");
    Vec m = g.to_modes(f);
    m(0) = 0.0;
    for (int i = 1; i < m.size(); ++i) {
        const double k = g.wavenumber(i);
        m(i) /= -(k * k);
    }
    return g.to_values(m);
}

double half_inverse_laplacian_norm(const PeriodicGrid& g, const ScalarField& f, double s,
                                   double tol) {
    if (std::abs(g.mean(f)) > tol)
        throw NonZeroMean("(-Delta)^(-1/2) needs a mean-free field");
    const Vec m = g.to_modes(f);
    double acc = 0.0;
    for (int i = 1; i < m.size(); ++i) {
        const double k = g.wavenumber(i);
        acc += std::pow(1.0 + k * k, s) * m(i) * m(i) / (k * k);
    }
    return std::sqrt(acc);
}

double sobolev_norm_modes(const PeriodicGrid& g, const Vec& m, double s) {
    double acc = 0.0;
    for (int i = 0; i < m.size(); ++i) {
        const double k = g.wavenumber(i);
        acc += std::pow(1.0 + k * k, s) * m(i) * m(i);
    }
    return std::sqrt(acc);
}

double sobolev_norm(const PeriodicGrid& g, const ScalarField& f, double s) {
    return sobolev_norm_modes(g, g.to_modes(f), s);
}

}  // namespace kakinuma
