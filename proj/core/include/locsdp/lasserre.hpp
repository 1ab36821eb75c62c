#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locsdp/config.hpp"
#include "locsdp/geometry.hpp"
#include "locsdp/oracle.hpp"
#include "locsdp/subsets.hpp"

namespace locsdp {

// Stored moments must stay inside [-kMomentBound, kMomentBound].
constexpr double kMomentBound = 10.0;

// Sparse pseudo-moment vector. The empty-set moment is the constant 1 and is
// never stored.
class PseudoMoments {
 public:
  PseudoMoments() = default;
  explicit PseudoMoments(int n) : n_(n) {}

  int n() const { return n_; }
  // Throws MissingMoment naming the subset when absent.
  double get(Subset s) const;
  bool has(Subset s) const { return s == 0 || values_.count(s) > 0; }
  void set(Subset s, double value);
  size_t stored() const { return values_.size(); }
  // Stored subsets, canonical order.
  std::vector<Subset> support() const;

  // Values at coordinate positions of `coords`, which must exclude the empty set.
  static PseudoMoments from_coordinates(int n, const SubsetIndexer& coords,
                                        const DenseVector& y);
  DenseVector to_coordinates(const SubsetIndexer& coords) const;

 private:
  int n_ = 0;
  std::unordered_map<Subset, double> values_;
};

// Moments of a probability distribution over 0/1 vectors, evaluated on
// `family`. Each atom is (set of coordinates equal to one, probability).
PseudoMoments distribution_moments(
    int n, const std::vector<std::pair<Subset, double>>& atoms,
    const std::vector<Subset>& family);

// Multilinear polynomial sum_S coef_S prod_{u in S} x_u. No zero coefficient
// is ever stored.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(std::initializer_list<std::pair<const Subset, double>> terms);

  void add(Subset s, double coef);
  const std::map<Subset, double>& terms() const { return terms_; }
  double coef(Subset s) const;
  int degree() const;
  bool empty() const { return terms_.empty(); }
  // Value at the 0/1 point whose one-coordinates are `ones`.
  double evaluate(Subset ones) const;
  // <P, y> = sum_S coef_S y_S.
  double pair(const PseudoMoments& y) const;

 private:
  std::map<Subset, double> terms_;
};

// Shifted moments (P * y)_S = sum_T P_T y_{T | S} for each S in `at`.
std::map<Subset, double> shift_operator(const Polynomial& p,
                                        const PseudoMoments& y,
                                        const std::vector<Subset>& at);
double shift_at(const Polynomial& p, const PseudoMoments& y, Subset s);

// [y_{A|B}] over rows `family`, in the given order.
DenseMatrix moment_matrix(const PseudoMoments& y,
                          const std::vector<Subset>& family);

enum class BlockKind { kBase, kObjective, kConstraint };

struct MomentBlock {
  BlockKind kind = BlockKind::kBase;
  int constraint_index = -1;  // set for kConstraint
  std::vector<Subset> rows;   // empty for the scalar objective block
  DenseMatrix matrix;
};

// Upper bound <objective, y> <= bound on the relaxed objective.
struct ObjectiveBound {
  Polynomial objective;
  double bound = 0.0;
};

// Base block over `base_rows`, the scalar objective block when present, one
// localizing block over `constraint_rows` per constraint.
std::vector<MomentBlock> local_block_matrix(
    const PseudoMoments& y, const std::vector<Subset>& base_rows,
    const std::vector<Subset>& constraint_rows,
    const std::vector<Polynomial>& constraints,
    const std::optional<ObjectiveBound>& objective = std::nullopt);
// Same row family for every block.
std::vector<MomentBlock> local_block_matrix(
    const PseudoMoments& y, const std::vector<Subset>& rows,
    const std::vector<Polynomial>& constraints,
    const std::optional<ObjectiveBound>& objective = std::nullopt);

// min Q(x) over x in {0,1}^n subject to P_i(x) >= 0.
struct PolynomialProgram {
  int n = 0;
  int degree = 2;  // bound on the degree of every polynomial
  int rounds = 1;
  Polynomial objective;
  std::vector<Polynomial> constraints;

  // Throws InvalidArgument when a degree bound or n is violated.
  void validate() const;
};

// Line format, '#' starts a comment:
//   n <int> / d <int> / r <int>
//   objective <coef> [members...]      one monomial per line, 1-based
//   constraint                         starts a new constraint
//   term <coef> [members...]           monomial of the latest constraint
PolynomialProgram parse_program(std::istream& in);
PolynomialProgram load_program(const std::string& path);
std::string format_program(const PolynomialProgram& program);

// Rows and coordinates of the local relaxation of a seed family F:
//   base rows        { A | C : A in F, |C| <= 1 }
//   constraint rows  F
//   coordinates      ex(F, 2) without the empty set
// Every block entry lies in ex(F, 2) when the program degree is at most 2.
std::vector<Subset> base_rows_of(const std::vector<Subset>& seeds, int n);
std::vector<Subset> coordinates_of(const std::vector<Subset>& seeds, int n);

// Seed family of the full level-r relaxation: all subsets of size < r.
std::vector<Subset> full_level_family(int n, int rounds);

// Precompiled PSD separation oracle over the local relaxation of one seed
// family. Index tables map every block entry to coordinate positions so a
// query never touches hashed moments.
class LocalRelaxation {
 public:
  LocalRelaxation(const PolynomialProgram& program, std::vector<Subset> seeds,
                  std::optional<double> objective_bound = std::nullopt,
                  const Tolerances& tol = default_tolerances());

  int n() const { return n_; }
  const std::vector<Subset>& seeds() const { return seeds_; }
  const SubsetIndexer& coordinates() const { return coords_; }
  int dim() const { return coords_.size(); }
  const std::vector<Subset>& base_rows() const { return base_rows_; }
  const std::vector<Subset>& constraint_rows() const { return seeds_; }
  int block_count() const { return static_cast<int>(blocks_.size()); }

  std::vector<MomentBlock> blocks(const DenseVector& y) const;
  // Smallest eigenvalue over all blocks (the objective block counts as its
  // scalar value).
  double min_eigenvalue(const DenseVector& y) const;
  // Feasible when every block has minimum eigenvalue >= -tol.psd; otherwise
  // the cut built from the most negative eigenpair of the worst block.
  SeparationResponse separate(const DenseVector& y) const;
  OracleHandle oracle() const;

 private:
  struct Term {
    int coord;  // -1 for the pinned empty-set moment
    double coef;
  };
  struct Block {
    BlockKind kind;
    int constraint_index;
    int size;
    // Entry (a, b) with a <= b owns terms [offsets[k], offsets[k + 1]).
    std::vector<int> offsets;
    std::vector<Term> terms;
  };

  DenseMatrix assemble(const Block& b, const DenseVector& y) const;
  int entry_index(const Block& b, int a, int c) const;

  int n_;
  std::vector<Subset> seeds_;
  std::vector<Subset> base_rows_;
  SubsetIndexer coords_;
  std::vector<Block> blocks_;
  Tolerances tol_;
};

}  // namespace locsdp
