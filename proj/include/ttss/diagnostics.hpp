#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "ttss/problem.hpp"
#include "ttss/tensor_train.hpp"
#include "ttss/tt_solver.hpp"

namespace ttss {

// ||approx - exact||_F / ||exact||_F in TT arithmetic.  Throws InvalidArgument
// when exact is zero.
double relative_error(const TTVector& approx, const TTVector& exact);

// Max-norm of a - b over all entries when the tensor has at most `exact_cap`
// entries, otherwise over `samples` random entries plus the first and last
// index of each mode.
double max_abs_difference(const TTVector& a, const TTVector& b, std::size_t exact_cap = 4'000'000,
                          int samples = 20000, std::uint64_t seed = 7);

// Sign changes of consecutive differences; differences with magnitude below
// floor_rel*max|values| are skipped.
int oscillation_count(const std::vector<double>& values, double floor_rel = 1e-12);

// Lagrange interpolation of a TT on representation nodes to per-dimension
// target lists (rank preserving).
TTVector tt_interpolate(const TTVector& x, const std::vector<std::vector<double>>& nodes,
                        const std::vector<std::vector<double>>& targets);

// Values along dimension `dim` at its representation nodes with the other
// coordinates at the domain center.
std::vector<double> midline(const TTVector& x, const std::vector<std::vector<double>>& nodes, int dim = 0);

enum class SweepMethod { Plain, T2S2 };

std::string to_string(SweepMethod m);

struct SweepCell {
  int degree = 0;
  double epsilon = 0.0;
  int flag = 0;       // 0 smooth, 1 oscillatory, 2 solver failure
  int count = 0;
  int expected = 0;
  double residual = 0.0;
  int max_rank = 0;
  double seconds = 0.0;
  std::string note;
};

struct SweepTable {
  int dims = 0;
  SweepMethod method = SweepMethod::T2S2;
  std::vector<int> degrees;
  std::vector<double> epsilons;
  std::vector<SweepCell> cells;  // degree-major

  const SweepCell& at(std::size_t degree_index, std::size_t eps_index) const {
    return cells[degree_index * epsilons.size() + eps_index];
  }
  // Flag matrix: one row per degree, one column per epsilon.
  std::string flags_csv() const;
  // One line per cell.
  std::string cells_csv() const;
};

// Stationary problem on [-1,1]^dims: -eps Lap f + ones . grad f = 1, f = 0
// on the boundary.
ProblemSpec sweep_problem(int dims, int degree, double epsilon, SweepMethod method);

// Oscillation counts of stabilized solves keyed by (dims, degree, eps).  A
// stabilized sweep cell doubles as the reference of the cell at eps/factor,
// so sharing one cache between sweeps avoids repeated solves.
class CountCache {
 public:
  std::optional<int> find(int dims, int degree, double eps) const;
  void store(int dims, int degree, double eps, int count);

 private:
  std::map<std::tuple<int, int, long long>, int> counts_;
};

struct SweepOptions {
  SolverConfig solver;
  double reference_factor = 1e3;  // expected count from the stabilized solve at eps*factor
  double floor_rel = 1e-12;
  bool verbose = false;
  std::shared_ptr<CountCache> cache;  // optional, shared between sweeps
};

SweepTable stability_sweep(int dims, const std::vector<int>& degrees, const std::vector<double>& epsilons,
                           SweepMethod method, const SweepOptions& opts = {});

struct InterfaceFit {
  std::vector<int> degrees;       // degrees with a located boundary
  std::vector<double> epsilons;   // boundary epsilon per degree
  double slope = 0.0;             // d log eps / d log n
  double intercept = 0.0;
  bool ok = false;
};

// For each degree: geometric mean of the largest oscillatory epsilon and the
// next larger epsilon (smooth).  Least-squares line in log-log.
InterfaceFit fit_interface(const SweepTable& table);

}  // namespace ttss
