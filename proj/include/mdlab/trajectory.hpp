#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "mdlab/evolution.hpp"
#include "mdlab/geometry.hpp"

namespace mdlab {

// Full-state checkpoint: all thirteen fields plus the time stamp, in the
// binary+JSON container of io.hpp. Used for crash recovery and --resume.
void save_checkpoint(const std::string& base_path, const FieldState& s);
FieldState load_checkpoint(const SpectralGrid& sg, const std::string& base_path);

// Spinor samples restricted to an axis-aligned node window [lo, lo+m) per axis.
// Windows keep long snapshot series in memory when only a patch of the box
// (the hyperboloid charts around the packet supports) is ever sampled.
struct SnapshotWindow {
  std::array<int, 3> lo{};
  int m{};
};

// Smallest cubical window containing the ball |x - center| <= radius, clamped
// to the box; covers the whole grid when the radius does.
SnapshotWindow window_for_radius(const GridSpec& spec, const std::array<double, 3>& center,
                                 double radius);

// Writes psi frames at a fixed time cadence into dir/frame_NNNNNN.{bin,json}
// and keeps dir/index.json current after every frame, so an interrupted run
// leaves a readable series. Reopening over an existing index resumes after the
// last recorded frame.
class SnapshotWriter {
 public:
  SnapshotWriter(std::string dir, const SpectralGrid& sg, SnapshotWindow window, double cadence);

  // Writes a frame when s.t has reached the next cadence point (within 1e-9);
  // returns true if a frame was written.
  bool maybe_write(const FieldState& s);
  void write(const FieldState& s);

  double next_due() const { return next_due_; }
  int frames_written() const { return count_; }

 private:
  void write_index() const;

  std::string dir_;
  const SpectralGrid& sg_;
  SnapshotWindow win_;
  double cadence_;
  double next_due_;
  int count_ = 0;
  std::vector<double> times_;
  std::vector<std::string> files_;
};

// In-memory reader for a snapshot series. Interpolation in time uses 6-point
// Lagrange applied to the mass-twisted field exp(+i gamma^0 t) psi, which is
// slowly varying compared to psi itself; the twist is undone at the query
// time. Queries must stay within the recorded time span and window.
class SnapshotSeries {
 public:
  explicit SnapshotSeries(const std::string& dir);

  const std::vector<double>& times() const { return times_; }
  double t_min() const { return times_.front(); }
  double t_max() const { return times_.back(); }
  const SnapshotWindow& window() const { return win_; }
  int grid_n() const { return n_; }
  double grid_L() const { return L_; }
  double grid_h() const { return h_; }

  // Spinor at full-grid node (i,j,k) and arbitrary t in the recorded span.
  Spinor sample(double t, const std::array<int, 3>& node) const;

  // Same, at a physical point that must coincide with a grid node (1e-6 h).
  Spinor sample_at(double t, const std::array<double, 3>& x) const;

  // Closure view for the asymptotics pipeline.
  std::function<Spinor(const SpacetimePoint&)> sampler() const;

 private:
  int n_ = 0;
  double L_ = 0.0;
  double h_ = 0.0;
  SnapshotWindow win_{};
  std::vector<double> times_;
  std::vector<std::vector<cplx>> frames_;  // per frame: 4 components x m^3, component-major
};

}  // namespace mdlab
