#include "slab/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

namespace slab {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

SlabGrid::SlabGrid(int n, double L, int N, int M, double gamma, double a, LateralBC bc)
    : n_(n), N_(N), M_(M), L_(L), a_(a), gamma_(gamma), bc_(bc) {
  require(n >= 1 && n <= 3, "lateral dimension n must be 1, 2 or 3, got " + std::to_string(n));
  require(L > 0.0, "lateral half-width L must be positive");
  require(N >= 2, "need at least 2 lateral nodes per axis, got " + std::to_string(N));
  require(M >= 2, "need at least 2 vertical cells, got " + std::to_string(M));
  require(gamma >= 1.0, "gamma_mesh must be >= 1, got " + std::to_string(gamma));
  (void)WeightExponent(a);
  y_.resize(static_cast<std::size_t>(M_) + 1);
  for (int j = 0; j <= M_; ++j)
    y_[static_cast<std::size_t>(j)] = std::pow(static_cast<double>(j) / M_, gamma_);
  y_.front() = 0.0;
  y_.back() = 1.0;
  init_vertical();
  init_lateral();
}

SlabGrid::SlabGrid(int n, double L, int N, std::vector<double> yLevels, double a, LateralBC bc,
                   double gammaMeta)
    : n_(n), N_(N), M_(static_cast<int>(yLevels.size()) - 1), L_(L), a_(a), gamma_(gammaMeta),
      bc_(bc), y_(std::move(yLevels)) {
  require(n >= 1 && n <= 3, "lateral dimension n must be 1, 2 or 3");
  require(L > 0.0, "lateral half-width L must be positive");
  require(N >= 2, "need at least 2 lateral nodes per axis");
  require(M_ >= 2, "need at least 2 vertical cells");
  (void)WeightExponent(a);
  require(y_.front() == 0.0 && y_.back() == 1.0, "yLevels must run from 0 to 1");
  for (int j = 0; j < M_; ++j)
    require(y_[static_cast<std::size_t>(j)] < y_[static_cast<std::size_t>(j) + 1],
            "yLevels must be strictly increasing");
  init_vertical();
  init_lateral();
}

void SlabGrid::init_vertical() {
  kappa_.resize(static_cast<std::size_t>(M_));
  W_.resize(static_cast<std::size_t>(M_));
  for (int j = 0; j < M_; ++j) {
    const double lo = y_[static_cast<std::size_t>(j)];
    const double hi = y_[static_cast<std::size_t>(j) + 1];
    kappa_[static_cast<std::size_t>(j)] =
        (1.0 - a_) / (std::pow(hi, 1.0 - a_) - std::pow(lo, 1.0 - a_));
    W_[static_cast<std::size_t>(j)] =
        (std::pow(hi, 1.0 + a_) - std::pow(lo, 1.0 + a_)) / (1.0 + a_);
  }
  levelW_.assign(static_cast<std::size_t>(M_) + 1, 0.0);
  for (int j = 0; j < M_; ++j) {
    levelW_[static_cast<std::size_t>(j)] += 0.5 * W_[static_cast<std::size_t>(j)];
    levelW_[static_cast<std::size_t>(j) + 1] += 0.5 * W_[static_cast<std::size_t>(j)];
  }
}

void SlabGrid::init_lateral() {
  h_ = bc_ == LateralBC::periodic ? 2.0 * L_ / N_ : 2.0 * L_ / (N_ - 1);
  latCount_ = 1;
  for (int d = 0; d < n_; ++d) {
    strides_[static_cast<std::size_t>(d)] = latCount_;
    latCount_ *= N_;
  }
}

double SlabGrid::axisMeasure(int i) const {
  if (bc_ == LateralBC::periodic) return h_;
  return (i == 0 || i == N_ - 1) ? 0.5 * h_ : h_;
}

namespace {
inline double overlap_len(double lo, double hi, double R) {
  const double a = std::max(lo, -R);
  const double b = std::min(hi, R);
  return b > a ? b - a : 0.0;
}
}  // namespace

double SlabGrid::axisMeasureClipped(int i, double R) const {
  if (R >= L_) return axisMeasure(i);
  const double x = coord(i);
  if (bc_ == LateralBC::periodic) {
    const double lo = x - 0.5 * h_, hi = x + 0.5 * h_;
    return overlap_len(lo, hi, R) + overlap_len(lo + 2.0 * L_, hi + 2.0 * L_, R) +
           overlap_len(lo - 2.0 * L_, hi - 2.0 * L_, R);
  }
  const double lo = i == 0 ? x : x - 0.5 * h_;
  const double hi = i == N_ - 1 ? x : x + 0.5 * h_;
  return overlap_len(lo, hi, R);
}

double SlabGrid::faceMeasureClipped(int i, double R) const {
  if (R >= L_) return h_;
  const double lo = coord(i), hi = lo + h_;
  if (bc_ == LateralBC::periodic)
    return overlap_len(lo, hi, R) + overlap_len(lo + 2.0 * L_, hi + 2.0 * L_, R) +
           overlap_len(lo - 2.0 * L_, hi - 2.0 * L_, R);
  return overlap_len(lo, hi, R);
}

std::int64_t SlabGrid::latIndex(std::span<const int> ix) const {
  std::int64_t lat = 0;
  for (int d = 0; d < n_; ++d) lat += strides_[static_cast<std::size_t>(d)] * ix[static_cast<std::size_t>(d)];
  return lat;
}

double SlabGrid::nodalMeasureClipped(std::int64_t lat, double R) const {
  double m = 1.0;
  for (int d = 0; d < n_; ++d) m *= axisMeasureClipped(latCoord(lat, d), R);
  return m;
}

bool SlabGrid::onLateralBoundary(std::int64_t lat) const {
  if (bc_ == LateralBC::periodic) return false;
  for (int d = 0; d < n_; ++d) {
    const int i = latCoord(lat, d);
    if (i == 0 || i == N_ - 1) return true;
  }
  return false;
}

double SlabGrid::supRadius(std::int64_t lat) const {
  double r = 0.0;
  for (int d = 0; d < n_; ++d) r = std::max(r, std::abs(coord(latCoord(lat, d))));
  return r;
}

std::string SlabGrid::describe() const {
  std::ostringstream os;
  os << "n=" << n_ << " L=" << L_ << " N=" << N_ << " M=" << M_ << " gamma=" << gamma_
     << " a=" << a_ << " bc=" << (bc_ == LateralBC::periodic ? "periodic" : "dirichlet");
  return os.str();
}

GridPtr build_grid(int n, double L, int N, int M, double gamma_mesh, double a, LateralBC bc) {
  return std::make_shared<const SlabGrid>(n, L, N, M, gamma_mesh, a, bc);
}

CsrMatrix assemble_operator(const SlabGrid& grid, double R) {
  const std::int64_t ndof = grid.dofCount();
  CsrMatrix A;
  A.rows = ndof;
  A.rowPtr.assign(static_cast<std::size_t>(ndof) + 1, 0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t dof = 0; dof < ndof; ++dof) {
    std::int64_t count = 1;  // diagonal
    for_each_edge(grid, dof, R, [&](std::int64_t, double) { ++count; });
    A.rowPtr[static_cast<std::size_t>(dof) + 1] = count;
  }
  for (std::int64_t r = 0; r < ndof; ++r)
    A.rowPtr[static_cast<std::size_t>(r) + 1] += A.rowPtr[static_cast<std::size_t>(r)];
  A.col.resize(static_cast<std::size_t>(A.rowPtr.back()));
  A.val.resize(static_cast<std::size_t>(A.rowPtr.back()));

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t dof = 0; dof < ndof; ++dof) {
    std::int64_t k = A.rowPtr[static_cast<std::size_t>(dof)];
    // neighbors first, then diagonal; sort at the end
    double diag = 0.0;
    std::int64_t kn = k;
    for_each_edge(grid, dof, R, [&](std::int64_t other, double c) {
      A.col[static_cast<std::size_t>(kn)] = static_cast<std::int32_t>(other);
      A.val[static_cast<std::size_t>(kn)] = -c;
      diag += c;
      ++kn;
    });
    A.col[static_cast<std::size_t>(kn)] = static_cast<std::int32_t>(dof);
    A.val[static_cast<std::size_t>(kn)] = diag;
    ++kn;
    // insertion sort by column (rows are short)
    for (std::int64_t p = k + 1; p < kn; ++p) {
      const std::int32_t c = A.col[static_cast<std::size_t>(p)];
      const double v = A.val[static_cast<std::size_t>(p)];
      std::int64_t q = p - 1;
      while (q >= k && A.col[static_cast<std::size_t>(q)] > c) {
        A.col[static_cast<std::size_t>(q) + 1] = A.col[static_cast<std::size_t>(q)];
        A.val[static_cast<std::size_t>(q) + 1] = A.val[static_cast<std::size_t>(q)];
        --q;
      }
      A.col[static_cast<std::size_t>(q) + 1] = c;
      A.val[static_cast<std::size_t>(q) + 1] = v;
    }
  }
  return A;
}

double apply_operator_row(const SlabGrid& grid, std::span<const double> v,
                          std::int64_t dofIndex, double R) {
  double diag = 0.0, off = 0.0;
  for_each_edge(grid, dofIndex, R, [&](std::int64_t other, double c) {
    diag += c;
    off += c * v[static_cast<std::size_t>(other)];
  });
  return diag * v[static_cast<std::size_t>(dofIndex)] - off;
}

std::vector<double> apply_neumann_flux(const SlabGrid& grid, std::span<const double> g) {
  require(static_cast<std::int64_t>(g.size()) == grid.latCount(),
          "Neumann datum must have one value per lateral node");
  std::vector<double> load(static_cast<std::size_t>(grid.dofCount()), 0.0);
  const std::int64_t nl = grid.latCount();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t lat = 0; lat < nl; ++lat)
    load[static_cast<std::size_t>(lat)] =
        g[static_cast<std::size_t>(lat)] * grid.nodalMeasure(lat);
  return load;
}

FluxField dual_flux(const ExtensionField& v) {
  const SlabGrid& g = *v.grid;
  const int M = g.cellsY();
  const std::int64_t nl = g.latCount();
  FluxField w;
  w.grid = v.grid;
  w.stationY.resize(static_cast<std::size_t>(M) + 2);
  w.stationY.front() = 0.0;
  for (int k = 1; k <= M; ++k)
    w.stationY[static_cast<std::size_t>(k)] =
        0.5 * (g.yLevels()[static_cast<std::size_t>(k) - 1] + g.yLevels()[static_cast<std::size_t>(k)]);
  w.stationY.back() = 1.0;
  w.values.assign(static_cast<std::size_t>(nl) * (M + 2), 0.0);

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t lat = 0; lat < nl; ++lat) {
    const double mu = g.nodalMeasure(lat);
    w.values[static_cast<std::size_t>(lat)] =
        apply_operator_row(g, v.values, g.dof(lat, 0), g.L()) / mu;
    for (int k = 1; k <= M; ++k)
      w.values[static_cast<std::size_t>(lat + nl * k)] =
          -g.faceConductY()[static_cast<std::size_t>(k) - 1] *
          (v.at(lat, k) - v.at(lat, k - 1));
    w.values[static_cast<std::size_t>(lat + nl * (M + 1))] =
        -apply_operator_row(g, v.values, g.dof(lat, M), g.L()) / mu;
  }
  return w;
}

std::vector<double> trace_measures(const SlabGrid& grid, double R) {
  std::vector<double> mu(static_cast<std::size_t>(grid.latCount()), 0.0);
  const std::int64_t nl = grid.latCount();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t lat = 0; lat < nl; ++lat)
    mu[static_cast<std::size_t>(lat)] = grid.nodalMeasureClipped(lat, R);
  return mu;
}

std::vector<std::uint8_t> lateral_boundary_mask(const SlabGrid& grid) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid.dofCount()), 0);
  if (grid.lateralBC() == LateralBC::periodic) return mask;
  const std::int64_t nl = grid.latCount();
  for (std::int64_t lat = 0; lat < nl; ++lat) {
    if (!grid.onLateralBoundary(lat)) continue;
    for (int lvl = 0; lvl < grid.levels(); ++lvl)
      mask[static_cast<std::size_t>(grid.dof(lat, lvl))] = 1;
  }
  return mask;
}

std::vector<std::uint8_t> sub_box_boundary_mask(const SlabGrid& grid, double R) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(grid.dofCount()), 0);
  const double tol = 1e-12 * grid.L();
  const std::int64_t nl = grid.latCount();
  for (std::int64_t lat = 0; lat < nl; ++lat) {
    if (grid.supRadius(lat) < R - tol) continue;
    for (int lvl = 0; lvl < grid.levels(); ++lvl)
      mask[static_cast<std::size_t>(grid.dof(lat, lvl))] = 1;
  }
  return mask;
}

// --- snapshot io ------------------------------------------------------------

namespace {
constexpr char kMagic[5] = {'S', 'L', 'A', 'B', '1'};

template <class T>
void write_raw(std::ofstream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  return v;
}
}  // namespace

void write_snapshot(const std::string& path, const ExtensionField& field) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open snapshot for writing: " + path);
  const SlabGrid& g = *field.grid;
  os.write(kMagic, 5);
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(g.latNodesPerAxis()));
  write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(g.cellsY()));
  write_raw<double>(os, g.a());
  write_raw<double>(os, g.L());
  write_raw<double>(os, g.gamma());
  write_raw<std::uint8_t>(os, static_cast<std::uint8_t>(g.lateralBC()));
  os.write(reinterpret_cast<const char*>(g.yLevels().data()),
           static_cast<std::streamsize>(sizeof(double) * g.yLevels().size()));
  os.write(reinterpret_cast<const char*>(field.values.data()),
           static_cast<std::streamsize>(sizeof(double) * field.values.size()));
  if (!os) throw std::runtime_error("short write on snapshot: " + path);
}

ExtensionField read_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open snapshot: " + path);
  char magic[5];
  is.read(magic, 5);
  if (!is || std::memcmp(magic, kMagic, 5) != 0)
    throw std::runtime_error("bad snapshot magic in " + path);
  const auto n = read_raw<std::uint32_t>(is);
  const auto N = read_raw<std::uint32_t>(is);
  const auto M = read_raw<std::uint32_t>(is);
  const auto a = read_raw<double>(is);
  const auto L = read_raw<double>(is);
  const auto gamma = read_raw<double>(is);
  const auto bc = read_raw<std::uint8_t>(is);
  std::vector<double> y(static_cast<std::size_t>(M) + 1);
  is.read(reinterpret_cast<char*>(y.data()),
          static_cast<std::streamsize>(sizeof(double) * y.size()));
  auto grid = std::make_shared<const SlabGrid>(static_cast<int>(n), L, static_cast<int>(N),
                                               std::move(y), a,
                                               static_cast<LateralBC>(bc), gamma);
  ExtensionField f(grid);
  is.read(reinterpret_cast<char*>(f.values.data()),
          static_cast<std::streamsize>(sizeof(double) * f.values.size()));
  if (!is) throw std::runtime_error("truncated snapshot: " + path);
  return f;
}

}  // namespace slab
