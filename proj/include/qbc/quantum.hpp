#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "qbc/rng.hpp"

namespace qbc {

using cplx = std::complex<double>;

inline constexpr double kAlgebraTol = 1e-12;

// Exact complex state vector of one qubit (2 amplitudes) or two qubits
// (4 amplitudes, tensor order qubit0 (x) qubit1).
class pure_state {
public:
    explicit pure_state(std::vector<cplx> amplitudes);
    static pure_state single(cplx a0, cplx a1);

    std::size_t dim() const { return amps_.size(); }
    int qubit_count() const { return amps_.size() == 2 ? 1 : 2; }
    const cplx& operator[](std::size_t i) const { return amps_[i]; }
    const std::vector<cplx>& amplitudes() const { return amps_; }

    double norm() const;

private:
    std::vector<cplx> amps_;
};

// The four single-photon signal states. Zero/One live in the Z basis,
// Plus/Minus in the X basis.
enum class bb84_label : std::uint8_t { zero, one, plus, minus };

pure_state make_bb84(bb84_label label);

// 1 when the label belongs to {One, Minus}, the set announced as o'=1.
inline int announced_bit(bb84_label l) {
    return (l == bb84_label::one || l == bb84_label::minus) ? 1 : 0;
}

// 0 = Z basis, 1 = X basis; matches the codeword-bit convention c_i.
inline int basis_bit(bb84_label l) {
    return (l == bb84_label::plus || l == bb84_label::minus) ? 1 : 0;
}

// Label for measurement outcome `outcome` in the basis named by `basis_bit`.
inline bb84_label label_for(int basis_bit, int outcome) {
    if (basis_bit == 0) return outcome == 0 ? bb84_label::zero : bb84_label::one;
    return outcome == 0 ? bb84_label::plus : bb84_label::minus;
}

char label_char(bb84_label l);
bb84_label label_from_char(char c);

// A two-outcome projective measurement basis on one qubit, stored as its two
// orthonormal vectors. Z, X and Rotated(theta) are the named constructions;
// `general` covers bases extracted from eigendecompositions.
struct basis {
    enum class kind : std::uint8_t { z, x, rotated, general };

    kind tag = kind::general;
    double theta = 0.0;  // meaningful when tag == rotated
    std::array<std::array<cplx, 2>, 2> vec{};

    const std::array<cplx, 2>& operator[](int j) const { return vec[j]; }
};

basis z_basis();
basis x_basis();
// |r0> = cos(theta)|0> + sin(theta)|1>, |r1> = sin(theta)|0> - cos(theta)|1>.
basis rotated_basis(double theta);
basis basis_from_vectors(std::array<cplx, 2> v0, std::array<cplx, 2> v1);
inline basis basis_named(int basis_bit) { return basis_bit == 0 ? z_basis() : x_basis(); }

// Equality up to vector ordering and per-vector global phase.
bool same_basis(const basis& a, const basis& b, double tol = 1e-9);

struct measure_result {
    int outcome;       // 0 or 1
    pure_state post;   // the basis vector that was projected onto
};

// Born-rule projective measurement of a one-qubit state.
measure_result measure(const pure_state& state, const basis& b, rng_stream& rng);

struct qubit_measure_result {
    int outcome;
    pure_state residual;  // renormalized state of the other qubit
};

// Partial measurement of qubit `which` (0 or 1) of a two-qubit state.
qubit_measure_result measure_qubit(const pure_state& state, int which, const basis& b,
                                   rng_stream& rng);

// |Phi+> = (|00> + |11>)/sqrt(2).
pure_state bell_pair();

// Probability that the fixed rule "outcome r0 -> set {Zero,Plus}, outcome
// r1 -> set {One,Minus}" names the right set for a uniformly random signal
// state measured in Rotated(theta): (2 + sqrt(2) cos(pi/4 - 2 theta)) / 4.
double distinguish_probability(double theta);

// Validated 2x2 density operator: Hermitian, unit trace, PSD.
class density_matrix {
public:
    static density_matrix from_entries(std::array<std::array<cplx, 2>, 2> entries);

    const cplx& at(int row, int col) const { return m_[row][col]; }
    const std::array<std::array<cplx, 2>, 2>& entries() const { return m_; }

private:
    explicit density_matrix(std::array<std::array<cplx, 2>, 2> m) : m_(m) {}
    std::array<std::array<cplx, 2>, 2> m_;
};

density_matrix density_of(const pure_state& state);

// Optimal two-state discrimination success at equal priors:
// 1/2 + Tr|rho0 - rho1| / 4.
double helstrom_probability(const density_matrix& rho0, const density_matrix& rho1);

// Eigenbasis of (rho0 - rho1); vector 0 spans the positive-eigenvalue
// subspace, so guessing rho0 on outcome 0 attains helstrom_probability.
// Throws if the operators coincide within tolerance.
basis helstrom_measurement(const density_matrix& rho0, const density_matrix& rho1);

}  // namespace qbc
