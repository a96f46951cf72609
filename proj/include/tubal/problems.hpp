#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "tubal/bcirc.hpp"
#include "tubal/ops.hpp"

namespace tubal {

// Benchmark problem descriptions, serializable to a flat key=value config.
struct ProblemSpec {
  enum class Kind { example1, poisson3d, file };
  Kind kind = Kind::example1;
  Index n = 0;  // slice size; m0^2 for poisson3d
  Index s = 1;
  Index n3 = 1;
  std::uint64_t seed = 0;
};

inline const char* to_string(ProblemSpec::Kind k) {
  switch (k) {
    case ProblemSpec::Kind::example1: return "example1";
    case ProblemSpec::Kind::poisson3d: return "poisson3d";
    case ProblemSpec::Kind::file: return "file";
  }
  return "unknown";
}

inline ProblemSpec::Kind problem_kind_from_string(const std::string& s) {
  if (s == "example1") return ProblemSpec::Kind::example1;
  if (s == "poisson3d") return ProblemSpec::Kind::poisson3d;
  if (s == "file") return ProblemSpec::Kind::file;
  throw IoError("unknown problem kind: " + s);
}

inline std::string to_config(const ProblemSpec& p) {
  std::ostringstream out;
  out << "kind=" << to_string(p.kind) << "\n"
      << "n=" << p.n << "\n"
      << "s=" << p.s << "\n"
      << "n3=" << p.n3 << "\n"
      << "seed=" << p.seed << "\n";
  return out.str();
}

inline ProblemSpec parse_problem_config(const std::string& text) {
  ProblemSpec p;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("problem config: malformed line: " + line);
    const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "kind") p.kind = problem_kind_from_string(val);
    else if (key == "n") p.n = std::stoll(val);
    else if (key == "s") p.s = std::stoll(val);
    else if (key == "n3") p.n3 = std::stoll(val);
    else if (key == "seed") p.seed = std::stoull(val);
    else throw IoError("problem config: unknown key: " + key);
  }
  return p;
}

template <typename Scalar>
struct GeneratedProblem {
  Tensor3<Scalar> a;
  Tensor3<Scalar> b;  // always tprod(a, x_star), exactly
  Tensor3<Scalar> x_star;
};

// Random diagonally-loaded slices: A_i = I + (i / (2 sqrt(n))) * U_i with
// U_i uniform(0,1).  The generator is mt19937_64 with an explicit 53-bit
// mantissa mapping so outputs are bit-identical across platforms; entries
// are drawn in storage order (slice-major, row-major).
template <typename Scalar>
GeneratedProblem<Scalar> gen_example1(Index n, Index s, Index n3,
                                      std::uint64_t seed) {
  if (n <= 0 || s <= 0 || n3 <= 0)
    throw ShapeError("gen_example1: sizes must be positive");
  GeneratedProblem<Scalar> p;
  p.a = Tensor3<Scalar>(n, n, n3);
  std::mt19937_64 rng(seed);
  auto uniform = [&rng] {
    return Scalar(rng() >> 11) * Scalar(0x1.0p-53);
  };
  const Scalar root = std::sqrt(Scalar(n));
  for (Index k = 0; k < n3; ++k) {
    const Scalar c = Scalar(k + 1) / (Scalar(2) * root);
    auto slice = p.a.slice(k);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) slice(i, j) = c * uniform();
    slice.diagonal().array() += Scalar(1);
  }
  p.x_star = Tensor3<Scalar>(n, s, n3);
  p.x_star.flat().setOnes();
  p.b = tprod(p.a, p.x_star);
  return p;
}

// Laplacian tensor of the 7-point Poisson stencil: slice 1 carries
// (-1/h^3) T with T tridiagonal(-1, 6, -1) whose corner diagonal entries
// are zeroed, slices 2 and n3 carry (-1/h^3) E with E the identity with
// zeroed first/last rows and columns, everything else is zero.
template <typename Scalar>
GeneratedProblem<Scalar> gen_poisson3d(Index m0_sq, Index s, Index n3) {
  if (m0_sq < 3 || n3 < 3)
    throw ShapeError("gen_poisson3d: m0_sq and n3 must be at least 3");
  if (s <= 0) throw ShapeError("gen_poisson3d: s must be positive");
  const Scalar h = Scalar(1) / Scalar(m0_sq + 1);
  const Scalar inv_h3 = Scalar(1) / (h * h * h);
  GeneratedProblem<Scalar> p;
  p.a = Tensor3<Scalar>(m0_sq, m0_sq, n3);
  auto stencil = p.a.slice(0);
  for (Index i = 1; i + 1 < m0_sq; ++i) stencil(i, i) = Scalar(-6) * inv_h3;
  for (Index i = 0; i + 1 < m0_sq; ++i)
    stencil(i, i + 1) = stencil(i + 1, i) = inv_h3;
  for (Index k : {Index(1), n3 - 1})
    for (Index i = 1; i + 1 < m0_sq; ++i)
      p.a(i, i, k) = Scalar(-1) * inv_h3;
  p.x_star = Tensor3<Scalar>(m0_sq, s, n3);
  p.x_star.flat().setOnes();
  p.b = tprod(p.a, p.x_star);
  return p;
}

template <typename Scalar>
GeneratedProblem<Scalar> generate(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemSpec::Kind::example1:
      return gen_example1<Scalar>(spec.n, spec.s, spec.n3, spec.seed);
    case ProblemSpec::Kind::poisson3d:
      return gen_poisson3d<Scalar>(spec.n, spec.s, spec.n3);
    case ProblemSpec::Kind::file:
      break;
  }
  throw Error("generate: file-backed problems are read, not generated");
}

// Brute-force reference: solves the unfolded bcirc system densely.  Meant
// for oracle-sized problems only, hence the hard size guard.
template <typename Scalar>
Tensor3<Scalar> dense_reference_solve(const Tensor3<Scalar>& a,
                                      const Tensor3<Scalar>& b) {
  if (b.n1() != a.n1() || b.n3() != a.n3())
    throw ShapeError("dense_reference_solve: b does not conform with a");
  if (a.n1() * a.n3() > 2000)
    throw SizeGuardError("dense_reference_solve: n1 * n3 exceeds 2000");
  const DenseMatrix<Scalar> big = bcirc(a);
  const DenseMatrix<Scalar> rhs = unfold(b);
  DenseMatrix<Scalar> x;
  if (a.n1() == a.n2()) {
    Eigen::FullPivLU<DenseMatrix<Scalar>> lu(big);
    if (!lu.isInvertible())
      throw SingularError("dense_reference_solve: bcirc(a) is singular");
    x = lu.solve(rhs);
  } else {
    x = big.colPivHouseholderQr().solve(rhs);
  }
  return fold(x, a.n3());
}

}  // namespace tubal
