#include "qbc/quantum.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace qbc {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double norm_sq(const std::array<cplx, 2>& v) {
    return std::norm(v[0]) + std::norm(v[1]);
}

cplx inner(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

// Eigen-pair of a 2x2 Hermitian matrix, eigenvalues descending.
struct eigen2 {
    double lambda0, lambda1;
    std::array<cplx, 2> v0, v1;
};

eigen2 hermitian_eigen(const std::array<std::array<cplx, 2>, 2>& m) {
    const double a = m[0][0].real();
    const double c = m[1][1].real();
    const cplx b = m[0][1];
    const double half_gap = 0.5 * (a - c);
    const double radius = std::sqrt(half_gap * half_gap + std::norm(b));
    const double mean = 0.5 * (a + c);

    eigen2 e;
    e.lambda0 = mean + radius;
    e.lambda1 = mean - radius;
    if (std::abs(b) < kAlgebraTol) {
        // Already diagonal; order the computational vectors by eigenvalue.
        if (a >= c) {
            e.v0 = {cplx(1, 0), cplx(0, 0)};
            e.v1 = {cplx(0, 0), cplx(1, 0)};
        } else {
            e.v0 = {cplx(0, 0), cplx(1, 0)};
            e.v1 = {cplx(1, 0), cplx(0, 0)};
        }
        return e;
    }
    // (m - lambda I) v = 0  =>  v = (b, lambda - a) up to scale.
    e.v0 = {b, cplx(e.lambda0 - a, 0)};
    const double s0 = std::sqrt(norm_sq(e.v0));
    e.v0 = {e.v0[0] / s0, e.v0[1] / s0};
    // Orthogonal complement in C^2.
    e.v1 = {-std::conj(e.v0[1]), std::conj(e.v0[0])};
    return e;
}

}  // namespace

pure_state::pure_state(std::vector<cplx> amplitudes) : amps_(std::move(amplitudes)) {
    if (amps_.size() != 2 && amps_.size() != 4) {
        throw std::invalid_argument("pure_state: amplitude count must be 2 or 4");
    }
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    if (std::abs(s - 1.0) > kAlgebraTol) {
        throw std::invalid_argument("pure_state: vector is not normalized");
    }
}

pure_state pure_state::single(cplx a0, cplx a1) {
    return pure_state(std::vector<cplx>{a0, a1});
}

double pure_state::norm() const {
    double s = 0.0;
    for (const auto& a : amps_) s += std::norm(a);
    return std::sqrt(s);
}

pure_state make_bb84(bb84_label label) {
    switch (label) {
        case bb84_label::zero:  return pure_state::single(1.0, 0.0);
        case bb84_label::one:   return pure_state::single(0.0, 1.0);
        case bb84_label::plus:  return pure_state::single(kInvSqrt2, kInvSqrt2);
        case bb84_label::minus: return pure_state::single(kInvSqrt2, -kInvSqrt2);
    }
    throw std::invalid_argument("make_bb84: bad label");
}

char label_char(bb84_label l) {
    switch (l) {
        case bb84_label::zero:  return '0';
        case bb84_label::one:   return '1';
        case bb84_label::plus:  return '+';
        case bb84_label::minus: return '-';
    }
    throw std::invalid_argument("label_char: bad label");
}

bb84_label label_from_char(char c) {
    switch (c) {
        case '0': return bb84_label::zero;
        case '1': return bb84_label::one;
        case '+': return bb84_label::plus;
        case '-': return bb84_label::minus;
    }
    throw std::invalid_argument("label_from_char: bad character");
}

basis z_basis() {
    basis b;
    b.tag = basis::kind::z;
    b.vec = {{{cplx(1, 0), cplx(0, 0)}, {cplx(0, 0), cplx(1, 0)}}};
    return b;
}

basis x_basis() {
    basis b;
    b.tag = basis::kind::x;
    b.vec = {{{cplx(kInvSqrt2, 0), cplx(kInvSqrt2, 0)},
              {cplx(kInvSqrt2, 0), cplx(-kInvSqrt2, 0)}}};
    return b;
}

basis rotated_basis(double theta) {
    if (!std::isfinite(theta)) {
        throw std::invalid_argument("rotated_basis: theta must be finite");
    }
    basis b;
    b.tag = basis::kind::rotated;
    b.theta = theta;
    const double ct = std::cos(theta), st = std::sin(theta);
    b.vec = {{{cplx(ct, 0), cplx(st, 0)}, {cplx(st, 0), cplx(-ct, 0)}}};
    return b;
}

basis basis_from_vectors(std::array<cplx, 2> v0, std::array<cplx, 2> v1) {
    if (std::abs(norm_sq(v0) - 1.0) > kAlgebraTol ||
        std::abs(norm_sq(v1) - 1.0) > kAlgebraTol ||
        std::abs(inner(v0, v1)) > kAlgebraTol) {
        throw std::invalid_argument("basis_from_vectors: vectors not orthonormal");
    }
    basis b;
    b.tag = basis::kind::general;
    b.vec = {v0, v1};
    return b;
}

bool same_basis(const basis& a, const basis& b, double tol) {
    auto matched = [&](int i, int j) {
        return std::abs(std::abs(inner(a.vec[i], b.vec[j])) - 1.0) <= tol;
    };
    return (matched(0, 0) && matched(1, 1)) || (matched(0, 1) && matched(1, 0));
}

measure_result measure(const pure_state& state, const basis& b, rng_stream& rng) {
    if (state.qubit_count() != 1) {
        throw std::invalid_argument("measure: expected a one-qubit state");
    }
    const cplx a0 = std::conj(b.vec[0][0]) * state[0] + std::conj(b.vec[0][1]) * state[1];
    const double p0 = std::norm(a0);
    const int outcome = rng.uniform() < p0 ? 0 : 1;
    return {outcome, pure_state::single(b.vec[outcome][0], b.vec[outcome][1])};
}

qubit_measure_result measure_qubit(const pure_state& state, int which, const basis& b,
                                   rng_stream& rng) {
    if (state.qubit_count() != 2) {
        throw std::invalid_argument("measure_qubit: expected a two-qubit state");
    }
    if (which != 0 && which != 1) {
        throw std::invalid_argument("measure_qubit: qubit index must be 0 or 1");
    }
    // Amplitude of (outcome j on `which`, value t on the other qubit):
    // contract the measured qubit's index against conj(b_j).
    auto contracted = [&](int j) {
        std::array<cplx, 2> r{};
        for (int t = 0; t < 2; ++t) {
            for (int m = 0; m < 2; ++m) {
                const std::size_t idx = which == 0 ? static_cast<std::size_t>(2 * m + t)
                                                   : static_cast<std::size_t>(2 * t + m);
                r[t] += std::conj(b.vec[j][m]) * state[idx];
            }
        }
        return r;
    };
    const std::array<cplx, 2> r0 = contracted(0);
    const double p0 = norm_sq(r0);
    const int outcome = rng.uniform() < p0 ? 0 : 1;
    const std::array<cplx, 2> rj = outcome == 0 ? r0 : contracted(1);
    const double scale = std::sqrt(norm_sq(rj));
    return {outcome, pure_state::single(rj[0] / scale, rj[1] / scale)};
}

pure_state bell_pair() {
    return pure_state(std::vector<cplx>{kInvSqrt2, 0.0, 0.0, kInvSqrt2});
}

double distinguish_probability(double theta) {
    return (2.0 + std::sqrt(2.0) * std::cos(M_PI / 4.0 - 2.0 * theta)) / 4.0;
}

density_matrix density_matrix::from_entries(std::array<std::array<cplx, 2>, 2> entries) {
    const cplx trace = entries[0][0] + entries[1][1];
    if (std::abs(entries[0][0].imag()) > kAlgebraTol ||
        std::abs(entries[1][1].imag()) > kAlgebraTol ||
        std::abs(entries[0][1] - std::conj(entries[1][0])) > kAlgebraTol) {
        throw std::invalid_argument("density_matrix: not Hermitian");
    }
    if (std::abs(trace - cplx(1, 0)) > kAlgebraTol) {
        throw std::invalid_argument("density_matrix: trace must be 1");
    }
    const eigen2 e = hermitian_eigen(entries);
    if (e.lambda0 < -kAlgebraTol || e.lambda1 < -kAlgebraTol) {
        throw std::invalid_argument("density_matrix: not positive semidefinite");
    }
    return density_matrix(entries);
}

density_matrix density_of(const pure_state& state) {
    if (state.qubit_count() != 1) {
        throw std::invalid_argument("density_of: expected a one-qubit state");
    }
    std::array<std::array<cplx, 2>, 2> m{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            m[i][j] = state[i] * std::conj(state[j]);
        }
    }
    return density_matrix::from_entries(m);
}

namespace {

std::array<std::array<cplx, 2>, 2> difference(const density_matrix& rho0,
                                              const density_matrix& rho1) {
    std::array<std::array<cplx, 2>, 2> d{};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            d[i][j] = rho0.at(i, j) - rho1.at(i, j);
        }
    }
    return d;
}

}  // namespace

double helstrom_probability(const density_matrix& rho0, const density_matrix& rho1) {
    const eigen2 e = hermitian_eigen(difference(rho0, rho1));
    const double trace_norm = std::abs(e.lambda0) + std::abs(e.lambda1);
    return 0.5 + 0.25 * trace_norm;
}

basis helstrom_measurement(const density_matrix& rho0, const density_matrix& rho1) {
    const eigen2 e = hermitian_eigen(difference(rho0, rho1));
    if (std::abs(e.lambda0) + std::abs(e.lambda1) < kAlgebraTol) {
        throw std::invalid_argument(
            "helstrom_measurement: operators coincide, discrimination is degenerate");
    }
    return basis_from_vectors(e.v0, e.v1);
}

}  // namespace qbc
