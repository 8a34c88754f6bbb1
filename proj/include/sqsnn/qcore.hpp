// Copyright 2026 The SQSNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Dense density-matrix kernel for small registers.
//
// Qubit 0 is the most significant bit of a basis-state index. Every matrix
// here is small (at most 2^12 on a side) and stored densely.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sqsnn/errors.hpp"
#include "sqsnn/rng.hpp"

namespace sqsnn {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMaxRegisterQubits = 12;
/// Outcomes less likely than this are treated as impossible.
inline constexpr double kMinBranchProbability = 1e-12;
inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kHermitianTolerance = 1e-10;
inline constexpr double kPsdTolerance = 1e-9;
inline constexpr double kUnitaryTolerance = 1e-10;

namespace detail {

inline int qubits_for_dim(Eigen::Index dim) {
    if (dim < 1 || (dim & (dim - 1)) != 0) {
        throw InvalidArgument("matrix dimension " + std::to_string(dim) + " is not a power of two");
    }
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) {
        ++n;
    }
    return n;
}

inline void hermitize(CMatrix &m) {
    m = (0.5 * (m + m.adjoint())).eval();
}

inline CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// For each value v over |qubits| bits (qubits[0] = most significant bit of
/// v), the full-register index with those bits placed and all others zero.
inline std::vector<std::uint64_t> scatter_table(int num_qubits, std::span<const int> qubits) {
    const std::size_t k = qubits.size();
    std::vector<std::uint64_t> table(std::size_t{1} << k, 0);
    for (std::uint64_t v = 0; v < table.size(); ++v) {
        std::uint64_t idx = 0;
        for (std::size_t b = 0; b < k; ++b) {
            if ((v >> (k - 1 - b)) & 1U) {
                idx |= std::uint64_t{1} << (num_qubits - 1 - qubits[b]);
            }
        }
        table[v] = idx;
    }
    return table;
}

inline void check_qubit_set(std::span<const int> qubits, int num_qubits, bool allow_empty, const char *what) {
    if (!allow_empty && qubits.empty()) {
        throw InvalidArgument(std::string(what) + ": qubit set is empty");
    }
    std::vector<bool> seen(static_cast<std::size_t>(num_qubits), false);
    for (int q : qubits) {
        if (q < 0 || q >= num_qubits) {
            throw InvalidArgument(std::string(what) + ": qubit " + std::to_string(q) + " outside register of " +
                                  std::to_string(num_qubits));
        }
        if (seen[static_cast<std::size_t>(q)]) {
            throw InvalidArgument(std::string(what) + ": qubit " + std::to_string(q) + " listed twice");
        }
        seen[static_cast<std::size_t>(q)] = true;
    }
}

inline std::vector<int> complement(std::span<const int> qubits, int num_qubits) {
    std::vector<bool> in(static_cast<std::size_t>(num_qubits), false);
    for (int q : qubits) {
        in[static_cast<std::size_t>(q)] = true;
    }
    std::vector<int> rest;
    for (int q = 0; q < num_qubits; ++q) {
        if (!in[static_cast<std::size_t>(q)]) {
            rest.push_back(q);
        }
    }
    return rest;
}

struct Trusted {};

}  // namespace detail

/// Ordered measurement record; bits[0] belongs to the first measured qubit.
struct BitString {
    std::vector<std::uint8_t> bits;

    std::size_t size() const noexcept {
        return bits.size();
    }

    std::uint64_t to_index() const noexcept {
        std::uint64_t v = 0;
        for (auto b : bits) {
            v = (v << 1) | (b & 1U);
        }
        return v;
    }

    static BitString from_index(std::uint64_t index, std::size_t num_bits) {
        BitString s;
        s.bits.resize(num_bits);
        for (std::size_t b = 0; b < num_bits; ++b) {
            s.bits[b] = static_cast<std::uint8_t>((index >> (num_bits - 1 - b)) & 1U);
        }
        return s;
    }

    friend bool operator==(const BitString &, const BitString &) = default;
};

/// Outcome distribution over bitstrings, indexed by BitString::to_index().
struct ProbabilityTable {
    int num_bits = 0;
    std::vector<double> probs;

    double operator[](std::uint64_t index) const {
        return probs.at(index);
    }

    double sum() const noexcept {
        double s = 0;
        for (double p : probs) {
            s += p;
        }
        return s;
    }

    /// Marginal probability that bit `b` reads 1.
    double marginal_one(int b) const {
        double s = 0;
        for (std::uint64_t v = 0; v < probs.size(); ++v) {
            if ((v >> (num_bits - 1 - b)) & 1U) {
                s += probs[v];
            }
        }
        return s;
    }

    static ProbabilityTable point_mass(std::uint64_t index, int num_bits) {
        ProbabilityTable t;
        t.num_bits = num_bits;
        t.probs.assign(std::size_t{1} << num_bits, 0.0);
        t.probs.at(index) = 1.0;
        return t;
    }
};

class Unitary {
   public:
    Unitary(detail::Trusted, CMatrix m) : m_(std::move(m)), num_qubits_(detail::qubits_for_dim(m_.rows())) {
    }

    /// Validates shape, finiteness and U U^dagger = I.
    static Unitary from_matrix(CMatrix m, double tolerance = kUnitaryTolerance) {
        if (m.rows() != m.cols()) {
            throw InvalidArgument("unitary must be square");
        }
        if (!m.allFinite()) {
            throw InvalidArgument("unitary has non-finite entries");
        }
        Unitary u(detail::Trusted{}, std::move(m));
        if (u.unitarity_error() > tolerance) {
            throw InvalidArgument("matrix is not unitary (error " + std::to_string(u.unitarity_error()) + ")");
        }
        return u;
    }

    static Unitary identity(int num_qubits) {
        const Eigen::Index d = Eigen::Index{1} << num_qubits;
        return Unitary(detail::Trusted{}, CMatrix::Identity(d, d));
    }

    int num_qubits() const noexcept {
        return num_qubits_;
    }
    Eigen::Index dim() const noexcept {
        return m_.rows();
    }
    const CMatrix &matrix() const noexcept {
        return m_;
    }

    Unitary adjoint() const {
        return Unitary(detail::Trusted{}, m_.adjoint());
    }

    double unitarity_error() const {
        return (m_ * m_.adjoint() - CMatrix::Identity(dim(), dim())).norm();
    }

    friend Unitary operator*(const Unitary &a, const Unitary &b) {
        if (a.dim() != b.dim()) {
            throw InvalidArgument("unitary product dimension mismatch");
        }
        return Unitary(detail::Trusted{}, a.m_ * b.m_);
    }

   private:
    CMatrix m_;
    int num_qubits_;
};

class DensityMatrix {
   public:
    DensityMatrix(detail::Trusted, CMatrix m) : m_(std::move(m)), num_qubits_(detail::qubits_for_dim(m_.rows())) {
    }

    /// Validates every invariant: finite, unit trace, Hermitian, PSD.
    static DensityMatrix from_matrix(CMatrix m) {
        if (m.rows() != m.cols()) {
            throw InvalidArgument("density matrix must be square");
        }
        DensityMatrix rho(detail::Trusted{}, std::move(m));
        if (auto why = rho.invariant_violation()) {
            throw StateCorruption(*why);
        }
        return rho;
    }

    /// |0...0><0...0| over num_qubits qubits; zero qubits gives the scalar 1.
    static DensityMatrix ground(int num_qubits) {
        const Eigen::Index d = Eigen::Index{1} << num_qubits;
        CMatrix m = CMatrix::Zero(d, d);
        m(0, 0) = 1.0;
        return DensityMatrix(detail::Trusted{}, std::move(m));
    }

    static DensityMatrix basis(const BitString &bits) {
        const Eigen::Index d = Eigen::Index{1} << bits.size();
        CMatrix m = CMatrix::Zero(d, d);
        const auto i = static_cast<Eigen::Index>(bits.to_index());
        m(i, i) = 1.0;
        return DensityMatrix(detail::Trusted{}, std::move(m));
    }

    static DensityMatrix pure(const CVector &psi) {
        const double n = psi.norm();
        if (!(n > 0) || !psi.allFinite()) {
            throw InvalidArgument("state vector must be finite and nonzero");
        }
        const CVector v = psi / n;
        return DensityMatrix(detail::Trusted{}, v * v.adjoint());
    }

    int num_qubits() const noexcept {
        return num_qubits_;
    }
    Eigen::Index dim() const noexcept {
        return m_.rows();
    }
    const CMatrix &matrix() const noexcept {
        return m_;
    }

    double trace_error() const {
        return std::abs(m_.trace() - Complex(1.0, 0.0));
    }

    double hermiticity_error() const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    }

    double min_eigenvalue() const {
        CMatrix h = m_;
        detail::hermitize(h);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    Eigen::VectorXd eigenvalues() const {
        CMatrix h = m_;
        detail::hermitize(h);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues();
    }

    std::optional<std::string> invariant_violation() const {
        if (!m_.allFinite()) {
            return "density matrix has non-finite entries";
        }
        if (trace_error() > kTraceTolerance) {
            return "trace deviates from 1 by " + std::to_string(trace_error());
        }
        if (hermiticity_error() > kHermitianTolerance) {
            return "not Hermitian (max deviation " + std::to_string(hermiticity_error()) + ")";
        }
        if (const double e = min_eigenvalue(); e < -kPsdTolerance) {
            return "not positive semidefinite (min eigenvalue " + std::to_string(e) + ")";
        }
        return std::nullopt;
    }

   private:
    CMatrix m_;
    int num_qubits_;
};

// ---------------------------------------------------------------- gates

inline void require_finite_angle(double angle, const char *gate) {
    if (!std::isfinite(angle)) {
        throw InvalidArgument(std::string(gate) + ": angle must be finite");
    }
}

/// Pauli-X rotation exp(-i angle X / 2).
inline Unitary rx(double angle) {
    require_finite_angle(angle, "rx");
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    CMatrix m(2, 2);
    m << Complex(c, 0), Complex(0, -s), Complex(0, -s), Complex(c, 0);
    return Unitary(detail::Trusted{}, std::move(m));
}

/// d rx / d angle.
inline CMatrix rx_derivative(double angle) {
    const double c = std::cos(angle / 2);
    const double s = std::sin(angle / 2);
    CMatrix m(2, 2);
    m << Complex(-s / 2, 0), Complex(0, -c / 2), Complex(0, -c / 2), Complex(-s / 2, 0);
    return m;
}

/// Controlled rx; qubit order (control, target).
inline Unitary crx(double angle) {
    require_finite_angle(angle, "crx");
    CMatrix m = CMatrix::Identity(4, 4);
    m.block(2, 2, 2, 2) = rx(angle).matrix();
    return Unitary(detail::Trusted{}, std::move(m));
}

inline CMatrix crx_derivative(double angle) {
    CMatrix m = CMatrix::Zero(4, 4);
    m.block(2, 2, 2, 2) = rx_derivative(angle);
    return m;
}

/// Lifts a k-qubit matrix acting on `qubits` (in that order) to the full register.
inline CMatrix embed_matrix(const CMatrix &gate, std::span<const int> qubits, int num_qubits) {
    detail::check_qubit_set(qubits, num_qubits, false, "embed");
    if (gate.rows() != (Eigen::Index{1} << qubits.size()) || gate.cols() != gate.rows()) {
        throw InvalidArgument("embed: gate size does not match qubit count");
    }
    const auto rest = detail::complement(qubits, num_qubits);
    const auto sk = detail::scatter_table(num_qubits, qubits);
    const auto sr = detail::scatter_table(num_qubits, rest);
    const Eigen::Index d = Eigen::Index{1} << num_qubits;
    CMatrix out = CMatrix::Zero(d, d);
    for (auto r : sr) {
        for (std::size_t a = 0; a < sk.size(); ++a) {
            for (std::size_t b = 0; b < sk.size(); ++b) {
                const Complex g = gate(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                if (g != Complex(0, 0)) {
                    out(static_cast<Eigen::Index>(sk[a] | r), static_cast<Eigen::Index>(sk[b] | r)) = g;
                }
            }
        }
    }
    return out;
}

inline Unitary embed(const Unitary &gate, std::span<const int> qubits, int num_qubits) {
    return Unitary(detail::Trusted{}, embed_matrix(gate.matrix(), qubits, num_qubits));
}

// ---------------------------------------------------------------- composition

/// Kronecker product; the first operand occupies the most significant qubits.
inline Unitary kron(const Unitary &a, const Unitary &b, int max_qubits = kMaxRegisterQubits) {
    if (a.num_qubits() + b.num_qubits() > max_qubits) {
        throw CapacityError("kron: " + std::to_string(a.num_qubits() + b.num_qubits()) +
                            " qubits exceeds register cap of " + std::to_string(max_qubits));
    }
    return Unitary(detail::Trusted{}, detail::kron(a.matrix(), b.matrix()));
}

inline DensityMatrix kron(const DensityMatrix &a, const DensityMatrix &b, int max_qubits = kMaxRegisterQubits) {
    if (a.num_qubits() + b.num_qubits() > max_qubits) {
        throw CapacityError("kron: " + std::to_string(a.num_qubits() + b.num_qubits()) +
                            " qubits exceeds register cap of " + std::to_string(max_qubits));
    }
    return DensityMatrix(detail::Trusted{}, detail::kron(a.matrix(), b.matrix()));
}

/// U rho U^dagger, re-Hermitized.
inline DensityMatrix evolve(const DensityMatrix &rho, const Unitary &u) {
    if (rho.dim() != u.dim()) {
        throw InvalidArgument("evolve: state has dimension " + std::to_string(rho.dim()) + ", unitary " +
                              std::to_string(u.dim()));
    }
    CMatrix out = u.matrix() * rho.matrix() * u.matrix().adjoint();
    detail::hermitize(out);
    return DensityMatrix(detail::Trusted{}, std::move(out));
}

/// Reduced state on `keep`; result qubit k is register qubit keep[k].
inline DensityMatrix partial_trace(const DensityMatrix &rho, std::span<const int> keep) {
    const int n = rho.num_qubits();
    detail::check_qubit_set(keep, n, false, "partial_trace");
    const auto rest = detail::complement(keep, n);
    const auto sk = detail::scatter_table(n, keep);
    const auto sr = detail::scatter_table(n, rest);
    const auto dk = static_cast<Eigen::Index>(sk.size());
    CMatrix out = CMatrix::Zero(dk, dk);
    const CMatrix &m = rho.matrix();
    for (Eigen::Index a = 0; a < dk; ++a) {
        for (Eigen::Index b = 0; b < dk; ++b) {
            Complex s = 0;
            for (auto r : sr) {
                s += m(static_cast<Eigen::Index>(sk[a] | r), static_cast<Eigen::Index>(sk[b] | r));
            }
            out(a, b) = s;
        }
    }
    detail::hermitize(out);
    return DensityMatrix(detail::Trusted{}, std::move(out));
}

// ---------------------------------------------------------------- measurement

/// Born-rule distribution over the measured qubits.
inline ProbabilityTable born_distribution(const DensityMatrix &rho, std::span<const int> measured) {
    const int n = rho.num_qubits();
    detail::check_qubit_set(measured, n, false, "born_distribution");
    if (!rho.matrix().allFinite() || rho.trace_error() > kTraceTolerance ||
        rho.hermiticity_error() > kHermitianTolerance) {
        throw StateCorruption("born_distribution: input violates density-matrix invariants");
    }
    const auto rest = detail::complement(measured, n);
    const auto sk = detail::scatter_table(n, measured);
    const auto sr = detail::scatter_table(n, rest);
    ProbabilityTable table;
    table.num_bits = static_cast<int>(measured.size());
    table.probs.resize(sk.size());
    const CMatrix &m = rho.matrix();
    for (std::size_t a = 0; a < sk.size(); ++a) {
        double p = 0;
        for (auto r : sr) {
            const auto i = static_cast<Eigen::Index>(sk[a] | r);
            p += m(i, i).real();
        }
        if (p < -1e-12 || p > 1 + 1e-12) {
            throw StateCorruption("born_distribution: probability " + std::to_string(p) + " outside [0, 1]");
        }
        table.probs[a] = std::clamp(p, 0.0, 1.0);
    }
    return table;
}

/// Draws one outcome. Consumes exactly one uniform from the stream.
inline BitString sample_outcome(const ProbabilityTable &dist, Stream &rng) {
    if (dist.probs.empty() || dist.probs.size() != (std::size_t{1} << dist.num_bits)) {
        throw InvalidArgument("sample_outcome: malformed table");
    }
    double total = 0;
    for (double p : dist.probs) {
        if (!(p >= 0) || !std::isfinite(p)) {
            throw InvalidArgument("sample_outcome: invalid probability");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw InvalidArgument("sample_outcome: probabilities sum to " + std::to_string(total));
    }
    const double u = rng.uniform() * total;
    double acc = 0;
    std::uint64_t last_nonzero = 0;
    for (std::uint64_t v = 0; v < dist.probs.size(); ++v) {
        if (dist.probs[v] <= 0) {
            continue;
        }
        last_nonzero = v;
        acc += dist.probs[v];
        if (u < acc) {
            return BitString::from_index(v, static_cast<std::size_t>(dist.num_bits));
        }
    }
    return BitString::from_index(last_nonzero, static_cast<std::size_t>(dist.num_bits));
}

/// Unnormalized conditional block (<b| x I) rho (|b> x I) over the unmeasured
/// qubits, in ascending register order, with its trace.
struct Branch {
    CMatrix block;
    double probability = 0;
};

inline Branch extract_branch(const DensityMatrix &rho, const BitString &outcome, std::span<const int> measured) {
    const int n = rho.num_qubits();
    detail::check_qubit_set(measured, n, false, "project_memory");
    if (outcome.size() != measured.size()) {
        throw InvalidArgument("project_memory: outcome length does not match measured set");
    }
    const auto rest = detail::complement(measured, n);
    const auto sk = detail::scatter_table(n, measured);
    const auto sr = detail::scatter_table(n, rest);
    const std::uint64_t base = sk[outcome.to_index()];
    const auto dr = static_cast<Eigen::Index>(sr.size());
    Branch br;
    br.block.resize(dr, dr);
    const CMatrix &m = rho.matrix();
    for (Eigen::Index a = 0; a < dr; ++a) {
        for (Eigen::Index b = 0; b < dr; ++b) {
            br.block(a, b) = m(static_cast<Eigen::Index>(base | sr[static_cast<std::size_t>(a)]),
                               static_cast<Eigen::Index>(base | sr[static_cast<std::size_t>(b)]));
        }
    }
    br.probability = br.block.trace().real();
    return br;
}

struct Projection {
    DensityMatrix memory;
    double probability;
};

/// Post-measurement state of the unmeasured qubits and the outcome probability.
inline Projection project_memory(const DensityMatrix &rho_im, const BitString &outcome,
                                 std::span<const int> measured) {
    Branch br = extract_branch(rho_im, outcome, measured);
    if (!(br.probability >= kMinBranchProbability)) {
        throw ZeroProbabilityBranch("project_memory: outcome probability " + std::to_string(br.probability) +
                                    " below floor");
    }
    CMatrix mem = br.block / br.probability;
    detail::hermitize(mem);
    return Projection{DensityMatrix(detail::Trusted{}, std::move(mem)), br.probability};
}

}  // namespace sqsnn
