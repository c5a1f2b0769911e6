#include "support/spectral_oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace nsverify::testing {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

TrigPolynomial::TrigPolynomial(int K)
    : K_(K), span_(2 * K + 1),
      c_(3 * static_cast<std::size_t>(span_) * span_ * span_, {0.0, 0.0}) {}

int TrigPolynomial::index(int comp, int kx, int ky, int kz) const {
    return ((comp * span_ + (kx + K_)) * span_ + (ky + K_)) * span_ + (kz + K_);
}

std::complex<double>& TrigPolynomial::coeff(int comp, int kx, int ky, int kz) {
    return c_[index(comp, kx, ky, kz)];
}
const std::complex<double>& TrigPolynomial::coeff(int comp, int kx, int ky,
                                                  int kz) const {
    return c_[index(comp, kx, ky, kz)];
}

TrigPolynomial TrigPolynomial::random(int K, std::uint64_t seed,
                                      bool zero_mean) {
    TrigPolynomial p(K);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int comp = 0; comp < 3; ++comp)
        for (int kx = -K; kx <= K; ++kx)
            for (int ky = -K; ky <= K; ++ky)
                for (int kz = -K; kz <= K; ++kz) {
                    // Fill the half-space once; mirror the conjugate.
                    if (std::make_tuple(kx, ky, kz) <
                        std::make_tuple(-kx, -ky, -kz))
                        continue;
                    if (kx == 0 && ky == 0 && kz == 0) {
                        p.coeff(comp, 0, 0, 0) =
                            zero_mean ? 0.0 : gauss(rng);
                        continue;
                    }
                    const std::complex<double> v(gauss(rng), gauss(rng));
                    p.coeff(comp, kx, ky, kz) = v;
                    p.coeff(comp, -kx, -ky, -kz) = std::conj(v);
                }
    return p;
}

Eigen::Vector3d TrigPolynomial::evaluate(const Eigen::Vector3d& x) const {
    Eigen::Vector3d out = Eigen::Vector3d::Zero();
    for (int comp = 0; comp < 3; ++comp) {
        std::complex<double> acc(0.0, 0.0);
        for (int kx = -K_; kx <= K_; ++kx)
            for (int ky = -K_; ky <= K_; ++ky)
                for (int kz = -K_; kz <= K_; ++kz) {
                    const double phase =
                        kTwoPi * (kx * x[0] + ky * x[1] + kz * x[2]);
                    acc += coeff(comp, kx, ky, kz) *
                           std::complex<double>(std::cos(phase),
                                                std::sin(phase));
                }
        out[comp] = acc.real();
    }
    return out;
}

Eigen::Matrix3d TrigPolynomial::gradient(const Eigen::Vector3d& x) const {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    for (int comp = 0; comp < 3; ++comp)
        for (int kx = -K_; kx <= K_; ++kx)
            for (int ky = -K_; ky <= K_; ++ky)
                for (int kz = -K_; kz <= K_; ++kz) {
                    const double phase =
                        kTwoPi * (kx * x[0] + ky * x[1] + kz * x[2]);
                    const std::complex<double> e(std::cos(phase),
                                                 std::sin(phase));
                    const std::complex<double> v =
                        coeff(comp, kx, ky, kz) * e *
                        std::complex<double>(0.0, kTwoPi);
                    g(0, comp) += (v * static_cast<double>(kx)).real();
                    g(1, comp) += (v * static_cast<double>(ky)).real();
                    g(2, comp) += (v * static_cast<double>(kz)).real();
                }
    return g;
}

double TrigPolynomial::l2_norm() const {
    double acc = 0.0;
    for (const auto& v : c_) acc += std::norm(v);
    return std::sqrt(acc);
}

double TrigPolynomial::lp_norm(double p, int grid_per_axis) const {
    int N = grid_per_axis > 0 ? grid_per_axis : std::max(8 * K_, 16);
    // Staged evaluation of all three components on the uniform grid.
    std::vector<std::complex<double>> table(
        static_cast<std::size_t>(span_) * N);
    for (int k = -K_; k <= K_; ++k)
        for (int g = 0; g < N; ++g) {
            const double phase = kTwoPi * k * g / static_cast<double>(N);
            table[(k + K_) * N + g] = {std::cos(phase), std::sin(phase)};
        }
    std::vector<double> grid_sq(static_cast<std::size_t>(N) * N * N, 0.0);
    std::vector<std::complex<double>> s1(
        static_cast<std::size_t>(span_) * span_ * N);
    std::vector<std::complex<double>> s2(
        static_cast<std::size_t>(span_) * N * N);
    for (int comp = 0; comp < 3; ++comp) {
        // over kz
        for (int kx = 0; kx < span_; ++kx)
            for (int ky = 0; ky < span_; ++ky)
                for (int gz = 0; gz < N; ++gz) {
                    std::complex<double> acc(0.0, 0.0);
                    for (int kz = 0; kz < span_; ++kz)
                        acc += coeff(comp, kx - K_, ky - K_, kz - K_) *
                               table[kz * N + gz];
                    s1[(kx * span_ + ky) * N + gz] = acc;
                }
        // over ky
        for (int kx = 0; kx < span_; ++kx)
            for (int gy = 0; gy < N; ++gy)
                for (int gz = 0; gz < N; ++gz) {
                    std::complex<double> acc(0.0, 0.0);
                    for (int ky = 0; ky < span_; ++ky)
                        acc += s1[(kx * span_ + ky) * N + gz] *
                               table[ky * N + gy];
                    s2[(kx * N + gy) * N + gz] = acc;
                }
        // over kx
        for (int gx = 0; gx < N; ++gx)
            for (int gy = 0; gy < N; ++gy)
                for (int gz = 0; gz < N; ++gz) {
                    std::complex<double> acc(0.0, 0.0);
                    for (int kx = 0; kx < span_; ++kx)
                        acc += s2[(kx * N + gy) * N + gz] * table[kx * N + gx];
                    grid_sq[(gx * N + gy) * static_cast<std::size_t>(N) + gz] +=
                        acc.real() * acc.real();
                }
    }
    double sum = 0.0;
    for (double v : grid_sq) sum += std::pow(v, 0.5 * p);
    return std::pow(sum / (static_cast<double>(N) * N * N), 1.0 / p);
}

double TrigPolynomial::max_divergence_coeff() const {
    double worst = 0.0;
    for (int kx = -K_; kx <= K_; ++kx)
        for (int ky = -K_; ky <= K_; ++ky)
            for (int kz = -K_; kz <= K_; ++kz) {
                const std::complex<double> div =
                    std::complex<double>(0.0, kTwoPi) *
                    (static_cast<double>(kx) * coeff(0, kx, ky, kz) +
                     static_cast<double>(ky) * coeff(1, kx, ky, kz) +
                     static_cast<double>(kz) * coeff(2, kx, ky, kz));
                worst = std::max(worst, std::abs(div));
            }
    return worst;
}

Eigen::Vector3d TrigPolynomial::mean() const {
    return {coeff(0, 0, 0, 0).real(), coeff(1, 0, 0, 0).real(),
            coeff(2, 0, 0, 0).real()};
}

TrigPolynomial& TrigPolynomial::operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
}

TrigPolynomial& TrigPolynomial::operator-=(const TrigPolynomial& o) {
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

ScalarTrig::ScalarTrig(int K)
    : K_(K), span_(2 * K + 1),
      c_(static_cast<std::size_t>(span_) * span_ * span_, {0.0, 0.0}) {}

std::complex<double>& ScalarTrig::coeff(int kx, int ky, int kz) {
    return c_[((kx + K_) * span_ + (ky + K_)) * span_ + (kz + K_)];
}
const std::complex<double>& ScalarTrig::coeff(int kx, int ky, int kz) const {
    return c_[((kx + K_) * span_ + (ky + K_)) * span_ + (kz + K_)];
}

double ScalarTrig::evaluate(const Eigen::Vector3d& x) const {
    std::complex<double> acc(0.0, 0.0);
    for (int kx = -K_; kx <= K_; ++kx)
        for (int ky = -K_; ky <= K_; ++ky)
            for (int kz = -K_; kz <= K_; ++kz) {
                const double phase =
                    kTwoPi * (kx * x[0] + ky * x[1] + kz * x[2]);
                acc += coeff(kx, ky, kz) *
                       std::complex<double>(std::cos(phase), std::sin(phase));
            }
    return acc.real();
}

TrigPolynomial leray_project(const TrigPolynomial& v) {
    TrigPolynomial out = v;
    const int K = v.max_wavenumber();
    for (int kx = -K; kx <= K; ++kx)
        for (int ky = -K; ky <= K; ++ky)
            for (int kz = -K; kz <= K; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                const Eigen::Vector3d k(kx, ky, kz);
                const double k2 = k.squaredNorm();
                Eigen::Vector3cd vc(v.coeff(0, kx, ky, kz),
                                    v.coeff(1, kx, ky, kz),
                                    v.coeff(2, kx, ky, kz));
                const std::complex<double> kv =
                    k[0] * vc[0] + k[1] * vc[1] + k[2] * vc[2];
                vc -= (kv / k2) * k.cast<std::complex<double>>();
                for (int comp = 0; comp < 3; ++comp)
                    out.coeff(comp, kx, ky, kz) = vc[comp];
            }
    return out;
}

ExactStokes exact_stokes(const TrigPolynomial& F, double nu) {
    const int K = F.max_wavenumber();
    if (F.mean().cwiseAbs().maxCoeff() > 1e-13)
        throw std::invalid_argument("exact_stokes: F must be mean-free");
    ExactStokes out{TrigPolynomial(K), ScalarTrig(K)};
    for (int kx = -K; kx <= K; ++kx)
        for (int ky = -K; ky <= K; ++ky)
            for (int kz = -K; kz <= K; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                const Eigen::Vector3d k(kx, ky, kz);
                const double k2 = k.squaredNorm();
                const Eigen::Vector3cd fc(F.coeff(0, kx, ky, kz),
                                          F.coeff(1, kx, ky, kz),
                                          F.coeff(2, kx, ky, kz));
                const std::complex<double> kf =
                    k[0] * fc[0] + k[1] * fc[1] + k[2] * fc[2];
                const Eigen::Vector3cd solenoidal =
                    fc - (kf / k2) * k.cast<std::complex<double>>();
                const double lap = nu * kTwoPi * kTwoPi * k2;
                for (int comp = 0; comp < 3; ++comp)
                    out.u.coeff(comp, kx, ky, kz) = solenoidal[comp] / lap;
                // grad p = (I - P) F: p_k (2 pi i k) = (kf/k2) k.
                out.pressure.coeff(kx, ky, kz) =
                    kf / (k2 * std::complex<double>(0.0, kTwoPi));
            }
    return out;
}

TrigPolynomial exact_poisson(const TrigPolynomial& a) {
    const int K = a.max_wavenumber();
    if (a.mean().cwiseAbs().maxCoeff() > 1e-13)
        throw std::invalid_argument("exact_poisson: a must be mean-free");
    TrigPolynomial out(K);
    for (int kx = -K; kx <= K; ++kx)
        for (int ky = -K; ky <= K; ++ky)
            for (int kz = -K; kz <= K; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                const double lap =
                    kTwoPi * kTwoPi *
                    (static_cast<double>(kx) * kx + static_cast<double>(ky) * ky +
                     static_cast<double>(kz) * kz);
                for (int comp = 0; comp < 3; ++comp)
                    out.coeff(comp, kx, ky, kz) =
                        a.coeff(comp, kx, ky, kz) / lap;
            }
    return out;
}

double inner(const TrigPolynomial& a, const TrigPolynomial& b) {
    const int K = a.max_wavenumber();
    std::complex<double> acc(0.0, 0.0);
    for (int comp = 0; comp < 3; ++comp)
        for (int kx = -K; kx <= K; ++kx)
            for (int ky = -K; ky <= K; ++ky)
                for (int kz = -K; kz <= K; ++kz)
                    acc += a.coeff(comp, kx, ky, kz) *
                           std::conj(b.coeff(comp, kx, ky, kz));
    return acc.real();
}

double grad_inner(const TrigPolynomial& a, const TrigPolynomial& b) {
    const int K = a.max_wavenumber();
    std::complex<double> acc(0.0, 0.0);
    for (int comp = 0; comp < 3; ++comp)
        for (int kx = -K; kx <= K; ++kx)
            for (int ky = -K; ky <= K; ++ky)
                for (int kz = -K; kz <= K; ++kz) {
                    const double k2 =
                        static_cast<double>(kx) * kx +
                        static_cast<double>(ky) * ky +
                        static_cast<double>(kz) * kz;
                    acc += kTwoPi * kTwoPi * k2 * a.coeff(comp, kx, ky, kz) *
                           std::conj(b.coeff(comp, kx, ky, kz));
                }
    return acc.real();
}

double grad_norm(const TrigPolynomial& a) {
    return std::sqrt(std::max(grad_inner(a, a), 0.0));
}

double sample_projection_ratio(int count, int K, double p,
                               std::uint64_t seed) {
    double worst = 0.0;
    for (int s = 0; s < count; ++s) {
        const TrigPolynomial v = TrigPolynomial::random(K, seed + s);
        const TrigPolynomial pv = leray_project(v);
        double ratio;
        if (p == 2.0) {
            ratio = pv.l2_norm() / v.l2_norm();
        } else {
            ratio = pv.lp_norm(p) / v.lp_norm(p);
        }
        worst = std::max(worst, ratio);
    }
    return worst;
}

}  // namespace nsverify::testing
