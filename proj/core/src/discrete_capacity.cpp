#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "qmod/capacity.hpp"

namespace qmod {
namespace {

enum : std::uint8_t { kFree = 0, kZero = 1, kOne = 2 };

// Uniform node lattice with its Kuhn triangulation: each cell splits into n!
// simplices, one per axis ordering, whose vertices follow a monotone path
// from the lower corner to the upper corner.
struct Lattice {
  int n = 0;
  Point lo;
  double h = 0.0;
  std::vector<std::size_t> cells;
  std::vector<std::size_t> nodes;
  std::vector<std::size_t> stride;
  std::size_t node_count = 0;
  std::vector<std::vector<int>> perms;
  std::vector<std::vector<std::size_t>> path;  // per permutation, n + 1 node offsets
  double simplex_volume = 0.0;

  Lattice(Point origin, double spacing, std::vector<std::size_t> cell_counts)
      : n(static_cast<int>(origin.size())), lo(std::move(origin)), h(spacing), cells(std::move(cell_counts)) {
    nodes.resize(n);
    stride.resize(n);
    node_count = 1;
    for (int i = n - 1; i >= 0; --i) {
      nodes[i] = cells[i] + 1;
      stride[i] = node_count;
      node_count *= nodes[i];
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    simplex_volume = std::pow(h, n) / fact;
    do {
      perms.push_back(perm);
      std::vector<std::size_t> offs(n + 1, 0);
      for (int k = 0; k < n; ++k) offs[k + 1] = offs[k] + stride[perm[k]];
      path.push_back(std::move(offs));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }

  void position(std::size_t idx, double* x) const {
    for (int i = 0; i < n; ++i) {
      const std::size_t k = (idx / stride[i]) % nodes[i];
      x[i] = lo[i] + h * static_cast<double>(k);
    }
  }

  std::size_t slab_count() const { return cells[0]; }

  // Calls fn(base_node, cell_multi_index) for every cell of one slab along
  // axis 0, in a fixed order.
  template <class Fn>
  void for_cells_in_slab(std::size_t slab, Fn&& fn) const {
    std::size_t idx[8] = {};
    idx[0] = slab;
    for (;;) {
      std::size_t base = 0;
      for (int i = 0; i < n; ++i) base += idx[i] * stride[i];
      fn(base, idx);
      int axis = n - 1;
      while (axis > 0) {
        if (++idx[axis] < cells[axis]) break;
        idx[axis] = 0;
        --axis;
      }
      if (axis == 0) return;
    }
  }
};

// Runs fn(slab) over slabs first, first + 2, ... split across workers. Slabs
// two apart share no nodes, so scatter writes never race, and the per-node
// accumulation order does not depend on the worker count.
template <class Fn>
void for_alternate_slabs(int jobs, std::size_t first, std::size_t slabs, Fn&& fn) {
  std::vector<std::size_t> list;
  for (std::size_t s = first; s < slabs; s += 2) list.push_back(s);
  const std::size_t workers = std::min<std::size_t>(std::max(jobs, 1), list.size());
  if (workers <= 1) {
    for (std::size_t s : list) fn(s);
    return;
  }
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < list.size(); k += workers) fn(list[k]);
    });
  }
  for (auto& t : pool) t.join();
}

// Projection distance from point t (cell-local units) to the Kuhn simplex
// 1 >= y[perm[0]] >= ... >= y[perm[n-1]] >= 0: isotonic regression by pool
// adjacent violators, then clamping.
double simplex_distance2(const double* t, const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  double val[8];
  int len[8];
  int blocks = 0;
  for (int k = 0; k < n; ++k) {
    val[blocks] = t[perm[k]];
    len[blocks] = 1;
    ++blocks;
    while (blocks >= 2 && val[blocks - 2] < val[blocks - 1]) {
      const int w = len[blocks - 2] + len[blocks - 1];
      val[blocks - 2] = (val[blocks - 2] * len[blocks - 2] + val[blocks - 1] * len[blocks - 1]) / w;
      len[blocks - 2] = w;
      --blocks;
    }
  }
  double d2 = 0.0;
  int k = 0;
  for (int b = 0; b < blocks; ++b) {
    const double y = std::clamp(val[b], 0.0, 1.0);
    for (int j = 0; j < len[b]; ++j, ++k) {
      const double diff = y - t[perm[k]];
      d2 += diff * diff;
    }
  }
  return d2;
}

bool in_closed(const Region& r, const double* x, int n, double tol) {
  if (const auto* b = std::get_if<Ball>(&r)) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (x[i] - b->center[i]) * (x[i] - b->center[i]);
    return std::sqrt(s) <= b->radius + tol;
  }
  const auto& box = std::get<Box>(r);
  for (int i = 0; i < n; ++i) {
    if (x[i] < box.lo[i] - tol || x[i] > box.hi[i] + tol) return false;
  }
  return true;
}

bool in_open(const Region& r, const double* x, int n, double tol) {
  if (const auto* b = std::get_if<Ball>(&r)) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += (x[i] - b->center[i]) * (x[i] - b->center[i]);
    return std::sqrt(s) < b->radius - tol;
  }
  const auto& box = std::get<Box>(r);
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > box.lo[i] + tol && x[i] < box.hi[i] - tol)) return false;
  }
  return true;
}

std::vector<std::uint8_t> classify_nodes(const Lattice& L, const Condenser& cond, PlateMask mask) {
  const int n = L.n;
  const double tol = 1e-9 * L.h;
  std::vector<std::uint8_t> zero(L.node_count, 0);
  std::vector<std::uint8_t> one(L.node_count, 0);
  double x[8];
  for (std::size_t v = 0; v < L.node_count; ++v) {
    L.position(v, x);
    if (!in_open(cond.outer, x, n, tol)) zero[v] = 1;
  }
  if (mask == PlateMask::kNodeMembership) {
    std::vector<std::uint8_t> cls(L.node_count, kFree);
    for (std::size_t v = 0; v < L.node_count; ++v) {
      L.position(v, x);
      const bool in_c = in_closed(cond.inner, x, n, tol);
      if (in_c && zero[v]) {
        throw std::domain_error("discrete capacity: plates are not separated at this resolution");
      }
      cls[v] = in_c ? kOne : (zero[v] ? kZero : kFree);
    }
    if (std::find(cls.begin(), cls.end(), kOne) == cls.end()) {
      throw std::domain_error("discrete capacity: the inner plate contains no lattice node");
    }
    return cls;
  }
  // Simplices leaving the closure of A are pinned to zero entirely.
  std::vector<std::uint8_t> outside(L.node_count, 0);
  for (std::size_t v = 0; v < L.node_count; ++v) {
    L.position(v, x);
    outside[v] = in_closed(cond.outer, x, n, tol) ? 0 : 1;
  }
  const Ball* c_ball = std::get_if<Ball>(&cond.inner);
  for (std::size_t s = 0; s < L.slab_count(); ++s) {
    L.for_cells_in_slab(s, [&](std::size_t base, const std::size_t* cell) {
      for (const auto& offs : L.path) {
        bool leaves = false;
        for (std::size_t o : offs) leaves = leaves || outside[base + o];
        if (leaves) {
          for (std::size_t o : offs) zero[base + o] = 1;
        }
      }
      if (!c_ball) return;
      // Local coordinates of the ball center in this cell.
      double t[8];
      double gap2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double z = L.lo[i] + L.h * static_cast<double>(cell[i]);
        t[i] = (c_ball->center[i] - z) / L.h;
        const double d = std::max({0.0, -t[i], t[i] - 1.0});
        gap2 += d * d;
      }
      const double r = c_ball->radius / L.h;
      if (gap2 > r * r * (1.0 + 1e-12)) return;
      for (std::size_t k = 0; k < L.perms.size(); ++k) {
        if (simplex_distance2(t, L.perms[k]) <= r * r * (1.0 + 1e-12)) {
          for (std::size_t o : L.path[k]) one[base + o] = 1;
        }
      }
    });
  }
  if (const auto* box = std::get_if<Box>(&cond.inner)) {
    // The smallest lattice-aligned box containing C; the piecewise-linear
    // potential is identically 1 on it.
    std::size_t lo_idx[8];
    std::size_t hi_idx[8];
    for (int i = 0; i < n; ++i) {
      const double a = (box->lo[i] - L.lo[i]) / L.h;
      const double b = (box->hi[i] - L.lo[i]) / L.h;
      lo_idx[i] = static_cast<std::size_t>(std::max(0.0, std::floor(a + 1e-9)));
      hi_idx[i] = static_cast<std::size_t>(std::min<double>(static_cast<double>(L.cells[i]), std::ceil(b - 1e-9)));
    }
    for (std::size_t v = 0; v < L.node_count; ++v) {
      bool in = true;
      for (int i = 0; i < n && in; ++i) {
        const std::size_t k = (v / L.stride[i]) % L.nodes[i];
        in = k >= lo_idx[i] && k <= hi_idx[i];
      }
      if (in) one[v] = 1;
    }
  }
  std::vector<std::uint8_t> cls(L.node_count, kFree);
  for (std::size_t v = 0; v < L.node_count; ++v) {
    if (zero[v] && one[v]) {
      throw std::domain_error("discrete capacity: plates are not separated at this resolution");
    }
    cls[v] = one[v] ? kOne : (zero[v] ? kZero : kFree);
  }
  return cls;
}

class EnergyModel {
 public:
  EnergyModel(const Lattice& L, double p, double mu, int jobs)
      : L_(L), p_(p), mu_(mu), jobs_(jobs), slab_sum_(L.slab_count(), 0.0) {}

  double energy(const std::vector<double>& u) const {
    for_all([&](std::size_t s) {
      double acc = 0.0;
      L_.for_cells_in_slab(s, [&](std::size_t base, const std::size_t*) {
        for (const auto& offs : L_.path) acc += simplex_energy(u, base, offs);
      });
      slab_sum_[s] = acc;
    });
    return total();
  }

  double energy_and_gradient(const std::vector<double>& u, std::vector<double>& grad) const {
    std::fill(grad.begin(), grad.end(), 0.0);
    const double inv_h = 1.0 / L_.h;
    auto slab = [&](std::size_t s) {
      double acc = 0.0;
      L_.for_cells_in_slab(s, [&](std::size_t base, const std::size_t*) {
        for (const auto& offs : L_.path) {
          double g[8];
          double s2 = mu_;
          for (int k = 0; k < L_.n; ++k) {
            g[k] = (u[base + offs[k + 1]] - u[base + offs[k]]) * inv_h;
            s2 += g[k] * g[k];
          }
          const double sp = std::pow(s2, 0.5 * p_ - 1.0);
          acc += L_.simplex_volume * sp * s2;
          const double c = L_.simplex_volume * p_ * sp * inv_h;
          for (int k = 0; k < L_.n; ++k) {
            grad[base + offs[k + 1]] += c * g[k];
            grad[base + offs[k]] -= c * g[k];
          }
        }
      });
      slab_sum_[s] = acc;
    };
    for_alternate_slabs(jobs_, 0, L_.slab_count(), slab);
    for_alternate_slabs(jobs_, 1, L_.slab_count(), slab);
    return total();
  }

  // First and second derivative of alpha -> E(u + alpha d).
  std::pair<double, double> directional(const std::vector<double>& u, const std::vector<double>& d,
                                        double alpha) const {
    std::vector<double> second(L_.slab_count(), 0.0);
    const double inv_h = 1.0 / L_.h;
    for_all([&](std::size_t s) {
      double first = 0.0;
      double sec = 0.0;
      L_.for_cells_in_slab(s, [&](std::size_t base, const std::size_t*) {
        for (const auto& offs : L_.path) {
          double dd[8];
          bool moving = false;
          for (int k = 0; k < L_.n; ++k) {
            dd[k] = (d[base + offs[k + 1]] - d[base + offs[k]]) * inv_h;
            moving = moving || dd[k] != 0.0;
          }
          if (!moving) continue;
          double s2 = mu_;
          double gd = 0.0;
          double d2 = 0.0;
          for (int k = 0; k < L_.n; ++k) {
            const double g = (u[base + offs[k + 1]] - u[base + offs[k]]) * inv_h + alpha * dd[k];
            s2 += g * g;
            gd += g * dd[k];
            d2 += dd[k] * dd[k];
          }
          const double sp = std::pow(s2, 0.5 * p_ - 1.0);
          first += L_.simplex_volume * p_ * sp * gd;
          sec += L_.simplex_volume * p_ * (sp * d2 + (p_ - 2.0) * sp / s2 * gd * gd);
        }
      });
      slab_sum_[s] = first;
      second[s] = sec;
    });
    double f2 = 0.0;
    for (double v : second) f2 += v;
    return {total(), f2};
  }

  // Diagonal of the frozen-coefficient p-Laplacian, for Jacobi scaling.
  void diagonal(const std::vector<double>& u, std::vector<double>& diag) const {
    std::fill(diag.begin(), diag.end(), 0.0);
    const double inv_h2 = 1.0 / (L_.h * L_.h);
    auto slab = [&](std::size_t s) {
      L_.for_cells_in_slab(s, [&](std::size_t base, const std::size_t*) {
        for (const auto& offs : L_.path) {
          double s2 = mu_;
          for (int k = 0; k < L_.n; ++k) {
            const double g = (u[base + offs[k + 1]] - u[base + offs[k]]) / L_.h;
            s2 += g * g;
          }
          const double c = L_.simplex_volume * p_ * std::max(p_ - 1.0, 1.0) *
                           std::pow(s2, 0.5 * p_ - 1.0) * inv_h2;
          for (int k = 0; k < L_.n; ++k) {
            diag[base + offs[k + 1]] += c;
            diag[base + offs[k]] += c;
          }
        }
      });
    };
    for_alternate_slabs(jobs_, 0, L_.slab_count(), slab);
    for_alternate_slabs(jobs_, 1, L_.slab_count(), slab);
  }

 private:
  double simplex_energy(const std::vector<double>& u, std::size_t base,
                        const std::vector<std::size_t>& offs) const {
    double s2 = mu_;
    for (int k = 0; k < L_.n; ++k) {
      const double g = (u[base + offs[k + 1]] - u[base + offs[k]]) / L_.h;
      s2 += g * g;
    }
    return L_.simplex_volume * std::pow(s2, 0.5 * p_);
  }

  template <class Fn>
  void for_all(Fn&& fn) const {
    for_alternate_slabs(jobs_, 0, L_.slab_count(), fn);
    for_alternate_slabs(jobs_, 1, L_.slab_count(), fn);
  }

  double total() const {
    double acc = 0.0;
    for (double v : slab_sum_) acc += v;
    return acc;
  }

  const Lattice& L_;
  double p_;
  double mu_;
  int jobs_;
  mutable std::vector<double> slab_sum_;
};

struct LevelResult {
  std::vector<double> u;
  double energy = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned Polak-Ribiere conjugate gradients with Newton line
// search and projection of free values onto [0, 1].
LevelResult minimize(const Lattice& L, const std::vector<std::uint8_t>& cls, std::vector<double> u,
                     double p, const DiscreteCapacityOptions& opt) {
  const std::size_t N = L.node_count;
  const EnergyModel model(L, p, opt.mu, opt.jobs);
  for (std::size_t v = 0; v < N; ++v) {
    if (cls[v] == kOne) u[v] = 1.0;
    else if (cls[v] == kZero) u[v] = 0.0;
    else u[v] = std::clamp(u[v], 0.0, 1.0);
  }
  auto mask = [&](std::vector<double>& w) {
    for (std::size_t v = 0; v < N; ++v) {
      if (cls[v] != kFree) w[v] = 0.0;
    }
  };
  std::vector<double> grad(N), z(N), d(N), diag(N), trial(N);
  auto refresh_diagonal = [&] {
    model.diagonal(u, diag);
    double mean = 0.0;
    std::size_t count = 0;
    for (std::size_t v = 0; v < N; ++v) {
      if (cls[v] == kFree) {
        mean += diag[v];
        ++count;
      }
    }
    mean = count ? mean / count : 1.0;
    for (double& x : diag) x = std::max(x, 1e-8 * mean);
  };

  LevelResult res;
  double E = model.energy_and_gradient(u, grad);
  mask(grad);
  refresh_diagonal();
  for (std::size_t v = 0; v < N; ++v) z[v] = grad[v] / diag[v];
  mask(z);
  for (std::size_t v = 0; v < N; ++v) d[v] = -z[v];
  double gz = std::inner_product(grad.begin(), grad.end(), z.begin(), 0.0);
  std::vector<double> history{E};

  for (int it = 1; it <= opt.max_iterations; ++it) {
    res.iterations = it;
    if (gz <= 0.0) {
      res.converged = true;
      break;
    }
    double slope = std::inner_product(grad.begin(), grad.end(), d.begin(), 0.0);
    if (slope >= 0.0) {
      for (std::size_t v = 0; v < N; ++v) d[v] = -z[v];
      slope = -gz;
    }
    // Newton iteration on the directional derivative.
    double alpha = 0.0;
    for (int k = 0; k < 30; ++k) {
      const auto [d1, d2] = model.directional(u, d, alpha);
      if (!(d2 > 0.0)) break;
      const double step = -d1 / d2;
      alpha = std::max(0.0, alpha + step);
      if (std::abs(step) <= 1e-10 * std::max(alpha, 1e-300)) break;
    }
    bool clipped = false;
    for (std::size_t v = 0; v < N; ++v) {
      const double w = u[v] + alpha * d[v];
      trial[v] = std::clamp(w, 0.0, 1.0);
      clipped = clipped || trial[v] != w;
    }
    std::vector<double> trial_grad(N);
    double E_new = model.energy_and_gradient(trial, trial_grad);
    if (!(E_new <= E)) {
      // Reject; restart along the preconditioned steepest descent.
      if (it > 1 && d[0] == -z[0]) break;
      for (std::size_t v = 0; v < N; ++v) d[v] = -z[v];
      continue;
    }
    u.swap(trial);
    mask(trial_grad);
    if (p != 2.0 && it % 25 == 0) refresh_diagonal();
    std::vector<double> z_new(N);
    for (std::size_t v = 0; v < N; ++v) z_new[v] = trial_grad[v] / diag[v];
    mask(z_new);
    double num = 0.0;
    for (std::size_t v = 0; v < N; ++v) num += trial_grad[v] * (z_new[v] - z[v]);
    const double beta = clipped ? 0.0 : std::max(0.0, num / gz);
    for (std::size_t v = 0; v < N; ++v) d[v] = -z_new[v] + beta * d[v];
    grad.swap(trial_grad);
    z.swap(z_new);
    gz = std::inner_product(grad.begin(), grad.end(), z.begin(), 0.0);
    E = E_new;
    history.push_back(E);
    const std::size_t w = static_cast<std::size_t>(opt.stall_window);
    if (history.size() > w) {
      const double drop = history[history.size() - 1 - w] - E;
      if (drop <= opt.rel_energy_tol * E) {
        res.converged = true;
        break;
      }
    }
  }
  res.energy = E;
  res.residual = std::sqrt(std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0));
  res.u = std::move(u);
  return res;
}

// Multilinear prolongation from a lattice to the one with half the spacing.
std::vector<double> prolong(const Lattice& coarse, const std::vector<double>& uc, const Lattice& fine) {
  const int n = fine.n;
  std::vector<double> uf(fine.node_count, 0.0);
  for (std::size_t v = 0; v < fine.node_count; ++v) {
    std::size_t base[8];
    bool odd[8];
    for (int i = 0; i < n; ++i) {
      const std::size_t k = (v / fine.stride[i]) % fine.nodes[i];
      base[i] = k / 2;
      odd[i] = k % 2 == 1;
    }
    double acc = 0.0;
    double wsum = 0.0;
    for (std::size_t c = 0; c < (std::size_t{1} << n); ++c) {
      double w = 1.0;
      std::size_t idx = 0;
      bool valid = true;
      for (int i = 0; i < n; ++i) {
        const bool up = (c >> i) & 1u;
        if (up && !odd[i]) {
          valid = false;
          break;
        }
        w *= odd[i] ? 0.5 : 1.0;
        idx += (base[i] + (up ? 1 : 0)) * coarse.stride[i];
      }
      if (!valid) continue;
      acc += w * uc[idx];
      wsum += w;
    }
    uf[v] = acc / wsum;
  }
  return uf;
}

struct Frame {
  Point lo;
  double extent = 0.0;
  std::vector<double> extents;
};

Frame bounding_frame(const Region& outer) {
  Frame f;
  if (const auto* b = std::get_if<Ball>(&outer)) {
    for (double c : b->center) {
      f.lo.push_back(c - b->radius);
      f.extents.push_back(2.0 * b->radius);
    }
  } else {
    const auto& box = std::get<Box>(outer);
    for (std::size_t i = 0; i < box.lo.size(); ++i) {
      f.lo.push_back(box.lo[i]);
      f.extents.push_back(box.hi[i] - box.lo[i]);
    }
  }
  f.extent = *std::max_element(f.extents.begin(), f.extents.end());
  return f;
}

}  // namespace

GridField GridSolution::as_field() const {
  Point hi = lo;
  for (std::size_t i = 0; i < counts.size(); ++i) hi[i] += spacing * static_cast<double>(counts[i] - 1);
  return GridField(lo, hi, counts, potential, 0.0);
}

GridSolution discrete_p_capacity(const Condenser& cond, const Exponents& e,
                                 const DiscreteCapacityOptions& opt) {
  validate(cond);
  const int n = dimension(cond.outer);
  if (n != e.n()) throw std::invalid_argument("discrete capacity: dimension mismatch");
  if (n > 8) throw std::invalid_argument("discrete capacity: at most 8 dimensions");
  if (opt.resolution < 32) throw std::invalid_argument("discrete capacity: resolution must be >= 32");
  const auto start = std::chrono::steady_clock::now();

  const Frame frame = bounding_frame(cond.outer);
  int coarsest = opt.resolution;
  if (opt.nested) {
    while (coarsest % 2 == 0 && coarsest / 2 >= 16) coarsest /= 2;
  }
  // Cell counts at the coarsest level; finer levels double them so lattices nest.
  std::vector<std::size_t> cells(n);
  const double h0 = frame.extent / coarsest;
  for (int i = 0; i < n; ++i) {
    cells[i] = static_cast<std::size_t>(std::max(1.0, std::ceil(frame.extents[i] / h0 - 1e-9)));
  }

  std::vector<double> u;
  std::unique_ptr<Lattice> prev;
  LevelResult last;
  int total_iterations = 0;
  for (int res = coarsest;; res *= 2) {
    auto lattice = std::make_unique<Lattice>(frame.lo, frame.extent / res, cells);
    std::vector<std::uint8_t> cls;
    try {
      cls = classify_nodes(*lattice, cond, opt.mask);
    } catch (const std::domain_error&) {
      if (res >= opt.resolution) throw;
      // Too coarse to resolve the plates; start fresh on the next level.
      prev.reset();
      for (auto& c : cells) c *= 2;
      continue;
    }
    std::vector<double> start_u = prev ? prolong(*prev, u, *lattice)
                                       : std::vector<double>(lattice->node_count, 0.0);
    last = minimize(*lattice, cls, std::move(start_u), e.p(), opt);
    total_iterations += last.iterations;
    u = last.u;
    prev = std::move(lattice);
    if (res >= opt.resolution) break;
    for (auto& c : cells) c *= 2;
  }

  GridSolution sol;
  sol.lo = prev->lo;
  sol.spacing = prev->h;
  sol.counts = prev->nodes;
  sol.potential = std::move(u);
  sol.energy = last.energy;
  sol.iterations = total_iterations;
  sol.residual = last.residual;
  sol.converged = last.converged;
  sol.resolution = opt.resolution;
  sol.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return sol;
}

}  // namespace qmod
