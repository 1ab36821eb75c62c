#include "locsdp/lasserre.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "locsdp/errors.hpp"

namespace locsdp {

namespace {

std::string index_name(Subset s) { return subset_to_string(s); }

[[noreturn]] void missing(Subset s) {
  throw Error(ErrorCode::kMissingMoment,
              "moment " + index_name(s) + " is not defined");
}

}  // namespace

double PseudoMoments::get(Subset s) const {
  if (s == 0) return 1.0;
  const auto it = values_.find(s);
  if (it == values_.end()) missing(s);
  return it->second;
}

void PseudoMoments::set(Subset s, double value) {
  if (s == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "the empty-set moment is pinned to 1");
  }
  if (!std::isfinite(value) || std::fabs(value) > kMomentBound) {
    throw Error(ErrorCode::kInvalidArgument,
                "moment " + index_name(s) + " = " + std::to_string(value) +
                    " outside the sanity bound");
  }
  values_[s] = value;
}

std::vector<Subset> PseudoMoments::support() const {
  std::vector<Subset> out;
  out.reserve(values_.size());
  for (const auto& kv : values_) out.push_back(kv.first);
  canonicalize(out);
  return out;
}

PseudoMoments PseudoMoments::from_coordinates(int n, const SubsetIndexer& coords,
                                              const DenseVector& y) {
  if (y.size() != coords.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "coordinate vector has " + std::to_string(y.size()) +
                    " entries for " + std::to_string(coords.size()) +
                    " moments");
  }
  PseudoMoments m(n);
  for (int i = 0; i < coords.size(); ++i) m.set(coords.at(i), y(i));
  return m;
}

DenseVector PseudoMoments::to_coordinates(const SubsetIndexer& coords) const {
  DenseVector y(coords.size());
  for (int i = 0; i < coords.size(); ++i) y(i) = get(coords.at(i));
  return y;
}

PseudoMoments distribution_moments(
    int n, const std::vector<std::pair<Subset, double>>& atoms,
    const std::vector<Subset>& family) {
  double total = 0.0;
  for (const auto& [ones, p] : atoms) {
    if (p < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "negative atom probability");
    }
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "atom probabilities sum to " + std::to_string(total));
  }
  PseudoMoments m(n);
  for (Subset s : family) {
    if (s == 0) continue;
    double v = 0.0;
    for (const auto& [ones, p] : atoms) {
      if (is_subset_of(s, ones)) v += p;
    }
    m.set(s, v);
  }
  return m;
}

Polynomial::Polynomial(
    std::initializer_list<std::pair<const Subset, double>> terms) {
  for (const auto& [s, c] : terms) add(s, c);
}

void Polynomial::add(Subset s, double coef) {
  const double v = (terms_.count(s) ? terms_[s] : 0.0) + coef;
  if (v == 0.0) {
    terms_.erase(s);
  } else {
    terms_[s] = v;
  }
}

double Polynomial::coef(Subset s) const {
  const auto it = terms_.find(s);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& kv : terms_) d = std::max(d, subset_size(kv.first));
  return d;
}

double Polynomial::evaluate(Subset ones) const {
  double v = 0.0;
  for (const auto& [s, c] : terms_) {
    if (is_subset_of(s, ones)) v += c;
  }
  return v;
}

double Polynomial::pair(const PseudoMoments& y) const {
  double v = 0.0;
  for (const auto& [s, c] : terms_) v += c * y.get(s);
  return v;
}

double shift_at(const Polynomial& p, const PseudoMoments& y, Subset s) {
  double v = 0.0;
  for (const auto& [t, c] : p.terms()) v += c * y.get(t | s);
  return v;
}

std::map<Subset, double> shift_operator(const Polynomial& p,
                                        const PseudoMoments& y,
                                        const std::vector<Subset>& at) {
  std::map<Subset, double> out;
  for (Subset s : at) out[s] = shift_at(p, y, s);
  return out;
}

DenseMatrix moment_matrix(const PseudoMoments& y,
                          const std::vector<Subset>& family) {
  const int m = static_cast<int>(family.size());
  DenseMatrix mat(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      mat(a, b) = mat(b, a) = y.get(family[a] | family[b]);
    }
  }
  return mat;
}

std::vector<MomentBlock> local_block_matrix(
    const PseudoMoments& y, const std::vector<Subset>& base_rows,
    const std::vector<Subset>& constraint_rows,
    const std::vector<Polynomial>& constraints,
    const std::optional<ObjectiveBound>& objective) {
  std::vector<MomentBlock> blocks;
  blocks.push_back({BlockKind::kBase, -1, base_rows, moment_matrix(y, base_rows)});
  if (objective) {
    DenseMatrix s(1, 1);
    s(0, 0) = objective->bound - objective->objective.pair(y);
    blocks.push_back({BlockKind::kObjective, -1, {}, s});
  }
  const int m = static_cast<int>(constraint_rows.size());
  for (size_t i = 0; i < constraints.size(); ++i) {
    DenseMatrix mat(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = a; b < m; ++b) {
        mat(a, b) = mat(b, a) = shift_at(constraints[i], y,
                                         constraint_rows[a] | constraint_rows[b]);
      }
    }
    blocks.push_back(
        {BlockKind::kConstraint, static_cast<int>(i), constraint_rows, mat});
  }
  return blocks;
}

std::vector<MomentBlock> local_block_matrix(
    const PseudoMoments& y, const std::vector<Subset>& rows,
    const std::vector<Polynomial>& constraints,
    const std::optional<ObjectiveBound>& objective) {
  return local_block_matrix(y, rows, rows, constraints, objective);
}

void PolynomialProgram::validate() const {
  if (n < 1 || n > kMaxElements) {
    throw Error(ErrorCode::kInvalidArgument,
                "program size n = " + std::to_string(n) + " outside [1, 64]");
  }
  if (degree < 0 || degree > 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "program degree must be at most 2, got " + std::to_string(degree));
  }
  const Subset universe =
      n == kMaxElements ? ~Subset{0} : (Subset{1} << n) - 1;
  auto check = [&](const Polynomial& p, const std::string& what) {
    if (p.degree() > degree) {
      throw Error(ErrorCode::kInvalidArgument,
                  what + " has degree " + std::to_string(p.degree()) +
                      " above the declared bound " + std::to_string(degree));
    }
    for (const auto& kv : p.terms()) {
      if (!is_subset_of(kv.first, universe)) {
        throw Error(ErrorCode::kInvalidArgument,
                    what + " mentions a variable beyond n");
      }
    }
  };
  check(objective, "objective");
  for (size_t i = 0; i < constraints.size(); ++i) {
    check(constraints[i], "constraint " + std::to_string(i + 1));
  }
}

PolynomialProgram parse_program(std::istream& in) {
  PolynomialProgram prog;
  std::string line;
  int line_no = 0;
  bool have_n = false;
  auto fail = [&](const std::string& why) {
    throw Error(ErrorCode::kParse,
                "line " + std::to_string(line_no) + ": " + why);
  };
  auto read_term = [&](std::istringstream& ss, Polynomial& target) {
    double coef = 0.0;
    if (!(ss >> coef)) fail("expected a coefficient");
    std::vector<int> members;
    int m = 0;
    while (ss >> m) {
      if (m < 1 || (have_n && m > prog.n)) fail("variable out of range");
      members.push_back(m - 1);
    }
    if (!ss.eof()) fail("unexpected token");
    target.add(subset_of(members), coef);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string key;
    if (!(ss >> key)) continue;
    if (key == "n" || key == "d" || key == "r") {
      int v = 0;
      if (!(ss >> v)) fail("expected an integer after '" + key + "'");
      if (key == "n") {
        prog.n = v;
        have_n = true;
      } else if (key == "d") {
        prog.degree = v;
      } else {
        prog.rounds = v;
      }
    } else if (key == "objective") {
      read_term(ss, prog.objective);
    } else if (key == "constraint") {
      prog.constraints.emplace_back();
    } else if (key == "term") {
      if (prog.constraints.empty()) fail("'term' before any 'constraint'");
      read_term(ss, prog.constraints.back());
    } else {
      fail("unknown keyword '" + key + "'");
    }
  }
  if (!have_n) throw Error(ErrorCode::kParse, "missing 'n' line");
  prog.validate();
  return prog;
}

PolynomialProgram load_program(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  return parse_program(in);
}

std::string format_program(const PolynomialProgram& program) {
  std::ostringstream out;
  out.precision(17);
  out << "n " << program.n << "\nd " << program.degree << "\nr "
      << program.rounds << "\n";
  auto emit = [&](const char* key, const Polynomial& p) {
    for (const auto& [s, c] : p.terms()) {
      out << key << ' ' << c;
      for (int m : subset_members(s)) out << ' ' << m + 1;
      out << '\n';
    }
  };
  emit("objective", program.objective);
  for (const Polynomial& p : program.constraints) {
    out << "constraint\n";
    emit("term", p);
  }
  return out.str();
}

std::vector<Subset> base_rows_of(const std::vector<Subset>& seeds, int n) {
  return pad_family(seeds, 1, n);
}

std::vector<Subset> coordinates_of(const std::vector<Subset>& seeds, int n) {
  std::vector<Subset> coords = extend_index_family(seeds, 2, n);
  coords.erase(coords.begin());  // canonical order puts the empty set first
  return coords;
}

std::vector<Subset> full_level_family(int n, int rounds) {
  if (rounds < 1) {
    throw Error(ErrorCode::kInvalidArgument, "rounds must be at least 1");
  }
  return subsets_up_to(n, rounds - 1);
}

LocalRelaxation::LocalRelaxation(const PolynomialProgram& program,
                                 std::vector<Subset> seeds,
                                 std::optional<double> objective_bound,
                                 const Tolerances& tol)
    : n_(program.n), seeds_(std::move(seeds)), tol_(tol) {
  program.validate();
  if (seeds_.empty()) seeds_.push_back(0);
  canonicalize(seeds_);
  base_rows_ = base_rows_of(seeds_, n_);
  coords_ = SubsetIndexer(coordinates_of(seeds_, n_));

  auto locate = [&](Subset s) {
    if (s == 0) return -1;
    const int i = coords_.find(s);
    if (i < 0) missing(s);
    return i;
  };
  auto tri = [](int m) { return m * (m + 1) / 2; };

  {
    Block b{BlockKind::kBase, -1, static_cast<int>(base_rows_.size()), {}, {}};
    b.offsets.reserve(static_cast<size_t>(tri(b.size) + 1));
    for (int a = 0; a < b.size; ++a) {
      for (int c = a; c < b.size; ++c) {
        b.offsets.push_back(static_cast<int>(b.terms.size()));
        b.terms.push_back({locate(base_rows_[a] | base_rows_[c]), 1.0});
      }
    }
    b.offsets.push_back(static_cast<int>(b.terms.size()));
    blocks_.push_back(std::move(b));
  }
  if (objective_bound) {
    Block b{BlockKind::kObjective, -1, 1, {0}, {}};
    const double q = *objective_bound - program.objective.coef(0);
    if (q != 0.0) b.terms.push_back({-1, q});
    for (const auto& [s, c] : program.objective.terms()) {
      if (s != 0) b.terms.push_back({locate(s), -c});
    }
    b.offsets.push_back(static_cast<int>(b.terms.size()));
    blocks_.push_back(std::move(b));
  }
  for (size_t i = 0; i < program.constraints.size(); ++i) {
    const Polynomial& p = program.constraints[i];
    Block b{BlockKind::kConstraint, static_cast<int>(i),
            static_cast<int>(seeds_.size()), {}, {}};
    for (int a = 0; a < b.size; ++a) {
      for (int c = a; c < b.size; ++c) {
        b.offsets.push_back(static_cast<int>(b.terms.size()));
        for (const auto& [t, coef] : p.terms()) {
          b.terms.push_back({locate(t | seeds_[a] | seeds_[c]), coef});
        }
      }
    }
    b.offsets.push_back(static_cast<int>(b.terms.size()));
    blocks_.push_back(std::move(b));
  }
}

int LocalRelaxation::entry_index(const Block& b, int a, int c) const {
  if (a > c) std::swap(a, c);
  return a * b.size - a * (a - 1) / 2 + (c - a);
}

DenseMatrix LocalRelaxation::assemble(const Block& b,
                                      const DenseVector& y) const {
  DenseMatrix m(b.size, b.size);
  int k = 0;
  for (int a = 0; a < b.size; ++a) {
    for (int c = a; c < b.size; ++c, ++k) {
      double v = 0.0;
      for (int t = b.offsets[k]; t < b.offsets[k + 1]; ++t) {
        const Term& term = b.terms[static_cast<size_t>(t)];
        v += term.coef * (term.coord < 0 ? 1.0 : y(term.coord));
      }
      m(a, c) = m(c, a) = v;
    }
  }
  return m;
}

std::vector<MomentBlock> LocalRelaxation::blocks(const DenseVector& y) const {
  if (y.size() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "relaxation expects " + std::to_string(dim()) +
                    " coordinates, got " + std::to_string(y.size()));
  }
  std::vector<MomentBlock> out;
  for (const Block& b : blocks_) {
    MomentBlock mb;
    mb.kind = b.kind;
    mb.constraint_index = b.constraint_index;
    if (b.kind == BlockKind::kBase) mb.rows = base_rows_;
    if (b.kind == BlockKind::kConstraint) mb.rows = seeds_;
    mb.matrix = assemble(b, y);
    out.push_back(std::move(mb));
  }
  return out;
}

namespace {

std::string block_name(BlockKind kind, int index) {
  switch (kind) {
    case BlockKind::kBase:
      return "base block";
    case BlockKind::kObjective:
      return "objective block";
    case BlockKind::kConstraint:
      return "constraint block " + std::to_string(index + 1);
  }
  return "block";
}

}  // namespace

double LocalRelaxation::min_eigenvalue(const DenseVector& y) const {
  double worst = std::numeric_limits<double>::infinity();
  for (const Block& b : blocks_) {
    const DenseMatrix m = assemble(b, y);
    if (b.size == 1) {
      worst = std::min(worst, m(0, 0));
      continue;
    }
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorCode::kEigenFailure,
                  "eigensolver failed on " +
                      block_name(b.kind, b.constraint_index));
    }
    worst = std::min(worst, es.eigenvalues()(0));
  }
  return worst;
}

namespace {

// Smallest eigenvalue of symmetric `m`: Householder tridiagonalization, then
// Sturm-count bisection on the Gershgorin interval.
double smallest_eigenvalue(const DenseMatrix& m) {
  const Eigen::Tridiagonalization<DenseMatrix> tri(m);
  const DenseVector diag = tri.diagonal();
  const DenseVector off = tri.subDiagonal();
  const int n = static_cast<int>(diag.size());
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::fabs(off(i - 1)) : 0.0) +
                     (i + 1 < n ? std::fabs(off(i)) : 0.0);
    lo = std::min(lo, diag(i) - r);
    hi = std::max(hi, diag(i) + r);
  }
  // Eigenvalues below x, from the signs of the LDL^T pivots of T - x I.
  auto count_below = [&](double x) {
    int count = 0;
    double d = 1.0;
    for (int i = 0; i < n; ++i) {
      const double b2 = i > 0 ? off(i - 1) * off(i - 1) : 0.0;
      d = diag(i) - x - (i > 0 ? b2 / d : 0.0);
      if (d == 0.0) d = -std::numeric_limits<double>::min();
      if (d < 0.0) ++count;
    }
    return count;
  };
  const double tol = 1e-13 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(mid) >= 1) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Eigenvector for the smallest eigenvalue `lambda` of symmetric `m`, by
// inverse iteration with a shift just below it. Falls back to the full
// decomposition unless the Rayleigh quotient lands within half of lambda.
DenseVector bottom_eigenvector(const DenseMatrix& m, double lambda) {
  const int n = static_cast<int>(m.rows());
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  DenseMatrix shifted = m;
  shifted.diagonal().array() -= lambda - 1e-9 * scale;
  const Eigen::PartialPivLU<DenseMatrix> lu(shifted);
  DenseVector v = DenseVector::Ones(n);
  for (int i = 0; i < n; ++i) v(i) += 1e-3 * i;
  v.normalize();
  for (int it = 0; it < 3; ++it) {
    v = lu.solve(v);
    const double norm = v.norm();
    if (!std::isfinite(norm) || norm == 0.0) break;
    v /= norm;
  }
  if (v.allFinite() && v.dot(m * v) <= 0.5 * lambda) return v;
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(m);
  return es.eigenvectors().col(0);
}

}  // namespace

SeparationResponse LocalRelaxation::separate(const DenseVector& y) const {
  if (y.size() != dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "relaxation expects " + std::to_string(dim()) +
                    " coordinates, got " + std::to_string(y.size()));
  }
  // The most violated block supplies the cut: its minimum eigenvector v has
  // v^T M v < -tol.psd, which no accepted point attains.
  const Block* violated = nullptr;
  DenseVector witness;
  double worst = -tol_.psd;
  for (const Block& b : blocks_) {
    DenseMatrix m = assemble(b, y);
    if (b.size == 1) {
      if (m(0, 0) < worst) {
        worst = m(0, 0);
        violated = &b;
        witness = DenseVector::Ones(1);
      }
      continue;
    }
    // M + tol.psd I factors exactly when the minimum eigenvalue clears
    // -tol.psd; only failing blocks pay for the eigensolver.
    DenseMatrix shifted = m;
    shifted.diagonal().array() += tol_.psd;
    if (Eigen::LLT<DenseMatrix>(shifted).info() == Eigen::Success) continue;
    const double lowest = smallest_eigenvalue(m);
    if (lowest < worst) {
      worst = lowest;
      violated = &b;
      witness.resize(0);
    }
  }
  if (violated == nullptr) return Feasible{};
  if (witness.size() == 0) witness = bottom_eigenvector(assemble(*violated, y), worst);

  // x^T M(y) x is linear in y; its coefficients, negated, form the cut.
  DenseVector c = DenseVector::Zero(dim());
  const Block& b = *violated;
  int k = 0;
  for (int a = 0; a < b.size; ++a) {
    for (int d = a; d < b.size; ++d, ++k) {
      const double w = (a == d ? 1.0 : 2.0) * witness(a) * witness(d);
      for (int t = b.offsets[k]; t < b.offsets[k + 1]; ++t) {
        const Term& term = b.terms[static_cast<size_t>(t)];
        if (term.coord >= 0) c(term.coord) -= term.coef * w;
      }
    }
  }
  // A violated block free of coordinates (a constant objective row) makes the
  // relaxation empty, so every direction separates.
  if (c.lpNorm<Eigen::Infinity>() == 0.0) c(0) = 1.0;
  return Cut{normalize_inf(c), 0.0};
}

OracleHandle LocalRelaxation::oracle() const {
  OracleHandle h;
  h.dim = dim();
  h.half_width = 1.0;
  h.query = [this](const DenseVector& y, double) { return separate(y); };
  return h;
}

}  // namespace locsdp
