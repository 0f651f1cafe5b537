#include "mdlab/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "mdlab/io.hpp"

namespace mdlab {

namespace {

std::string frame_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%06d", k);
  return buf;
}

int node_of(double x, double L, double h, int n) {
  const int i = static_cast<int>(std::lround((x + 0.5 * L) / h));
  if (i < 0 || i >= n || std::abs(-0.5 * L + i * h - x) > 1e-6 * h)
    throw std::invalid_argument("sample point does not sit on a grid node");
  return i;
}

}  // namespace

void save_checkpoint(const std::string& base_path, const FieldState& s) {
  const std::size_t sz = s.grid.size();
  std::vector<io::NamedField> fields;
  const char* cnames[4] = {"psi0", "psi1", "psi2", "psi3"};
  const char* anames[4] = {"a0", "a1", "a2", "a3"};
  const char* dnames[4] = {"adot0", "adot1", "adot2", "adot3"};
  const std::vector<std::size_t> cshape = {static_cast<std::size_t>(s.grid.n),
                                           static_cast<std::size_t>(s.grid.n),
                                           static_cast<std::size_t>(s.grid.n), 2};
  const std::vector<std::size_t> rshape(cshape.begin(), cshape.end() - 1);
  for (int c = 0; c < 4; ++c)
    fields.push_back({cnames[c], reinterpret_cast<const double*>(s.psi[c].data()), cshape});
  for (int c = 0; c < 4; ++c) fields.push_back({anames[c], s.a[c].data(), rshape});
  for (int c = 0; c < 4; ++c) fields.push_back({dnames[c], s.adot[c].data(), rshape});
  io::json meta;
  meta["kind"] = "checkpoint";
  meta["t"] = s.t;
  meta["grid"] = {{"n", s.grid.n}, {"L", s.grid.L}};
  meta["complex_fields"] = {"psi0", "psi1", "psi2", "psi3"};
  (void)sz;
  io::write_field_file(base_path, fields, meta);
}

FieldState load_checkpoint(const SpectralGrid& sg, const std::string& base_path) {
  const io::FieldFile ff = io::read_field_file(base_path);
  if (ff.metadata.value("kind", "") != "checkpoint")
    throw std::runtime_error(base_path + ": not a checkpoint file");
  const int n = ff.metadata.at("grid").at("n").get<int>();
  const double L = ff.metadata.at("grid").at("L").get<double>();
  if (n != sg.spec.n || std::abs(L - sg.spec.L) > 1e-12 * L)
    throw std::runtime_error(base_path + ": checkpoint grid does not match");

  FieldState s;
  s.t = ff.metadata.at("t").get<double>();
  s.grid = sg.spec;
  const std::size_t sz = sg.spec.size();
  const char* cnames[4] = {"psi0", "psi1", "psi2", "psi3"};
  const char* anames[4] = {"a0", "a1", "a2", "a3"};
  const char* dnames[4] = {"adot0", "adot1", "adot2", "adot3"};
  for (int c = 0; c < 4; ++c) {
    const std::vector<double>& raw = ff.at(cnames[c]);
    if (raw.size() != 2 * sz) throw std::runtime_error("checkpoint field size mismatch");
    s.psi[c].resize(sz);
    std::copy(raw.begin(), raw.end(), reinterpret_cast<double*>(s.psi[c].data()));
  }
  for (int c = 0; c < 4; ++c) {
    s.a[c] = ff.at(anames[c]);
    s.adot[c] = ff.at(dnames[c]);
    if (s.a[c].size() != sz || s.adot[c].size() != sz)
      throw std::runtime_error("checkpoint field size mismatch");
  }
  return s;
}

SnapshotWindow window_for_radius(const GridSpec& spec, const std::array<double, 3>& center,
                                 double radius) {
  if (radius <= 0.0) throw std::invalid_argument("snapshot window radius must be positive");
  int m = 0;
  std::array<int, 3> lo{};
  for (int d = 0; d < 3; ++d) {
    const int ilo = static_cast<int>(std::floor((center[d] - radius + 0.5 * spec.L) / spec.h()));
    const int ihi = static_cast<int>(std::ceil((center[d] + radius + 0.5 * spec.L) / spec.h()));
    lo[d] = ilo;
    m = std::max(m, ihi - ilo + 1);
  }
  m = std::min(m, spec.n);
  for (int d = 0; d < 3; ++d) lo[d] = std::clamp(lo[d], 0, spec.n - m);
  return {lo, m};
}

SnapshotWriter::SnapshotWriter(std::string dir, const SpectralGrid& sg, SnapshotWindow window,
                               double cadence)
    : dir_(std::move(dir)), sg_(sg), win_(window), cadence_(cadence), next_due_(0.0) {
  if (cadence <= 0.0) throw std::invalid_argument("snapshot cadence must be positive");
  if (win_.m < 1 || win_.m > sg.spec.n) throw std::invalid_argument("bad snapshot window");
  io::ensure_dir(dir_);
  const std::string index = dir_ + "/index.json";
  if (io::file_exists(index)) {
    const io::json j = io::read_json(index);
    times_ = j.at("times").get<std::vector<double>>();
    files_ = j.at("files").get<std::vector<std::string>>();
    count_ = static_cast<int>(times_.size());
    if (!times_.empty()) next_due_ = times_.back() + cadence_;
  }
}

bool SnapshotWriter::maybe_write(const FieldState& s) {
  if (count_ == 0 && times_.empty()) next_due_ = std::max(next_due_, s.t);
  if (s.t + 1e-9 < next_due_) return false;
  write(s);
  return true;
}

void SnapshotWriter::write(const FieldState& s) {
  const int m = win_.m;
  const std::size_t msz = static_cast<std::size_t>(m) * m * m;
  std::vector<cplx> buf(4 * msz);
  for (int c = 0; c < 4; ++c)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const std::size_t src = s.grid.index(win_.lo[0] + i, win_.lo[1] + j, win_.lo[2]);
        const std::size_t dst = c * msz + (static_cast<std::size_t>(i) * m + j) * m;
        std::copy_n(s.psi[c].data() + src, m, buf.data() + dst);
      }

  const std::string name = frame_name(count_);
  const std::vector<std::size_t> shape = {4, static_cast<std::size_t>(m),
                                          static_cast<std::size_t>(m),
                                          static_cast<std::size_t>(m), 2};
  io::json meta;
  meta["t"] = s.t;
  meta["window"] = {{"lo", win_.lo}, {"m", m}};
  meta["grid"] = {{"n", s.grid.n}, {"L", s.grid.L}};
  io::write_field_file(dir_ + "/" + name,
                       {{"psi", reinterpret_cast<const double*>(buf.data()), shape}}, meta);

  times_.push_back(s.t);
  files_.push_back(name);
  ++count_;
  next_due_ = times_.front() + cadence_ * count_;
  write_index();
}

void SnapshotWriter::write_index() const {
  io::json j;
  j["cadence"] = cadence_;
  j["times"] = times_;
  j["files"] = files_;
  j["window"] = {{"lo", win_.lo}, {"m", win_.m}};
  j["grid"] = {{"n", sg_.spec.n}, {"L", sg_.spec.L}};
  const std::string tmp = dir_ + "/index.json.tmp";
  io::write_json(tmp, j);
  std::rename(tmp.c_str(), (dir_ + "/index.json").c_str());
}

SnapshotSeries::SnapshotSeries(const std::string& dir) {
  const io::json j = io::read_json(dir + "/index.json");
  times_ = j.at("times").get<std::vector<double>>();
  const auto files = j.at("files").get<std::vector<std::string>>();
  win_.lo = j.at("window").at("lo").get<std::array<int, 3>>();
  win_.m = j.at("window").at("m").get<int>();
  n_ = j.at("grid").at("n").get<int>();
  L_ = j.at("grid").at("L").get<double>();
  h_ = L_ / n_;
  if (times_.size() < 2) throw std::runtime_error(dir + ": snapshot series needs >= 2 frames");
  if (!std::is_sorted(times_.begin(), times_.end()))
    throw std::runtime_error(dir + ": snapshot times not monotone");

  const std::size_t msz = static_cast<std::size_t>(win_.m) * win_.m * win_.m;
  frames_.reserve(files.size());
  for (const std::string& f : files) {
    const io::FieldFile ff = io::read_field_file(dir + "/" + f);
    const std::vector<double>& raw = ff.at("psi");
    if (raw.size() != 8 * msz) throw std::runtime_error(dir + "/" + f + ": frame size mismatch");
    std::vector<cplx> frame(4 * msz);
    std::copy(raw.begin(), raw.end(), reinterpret_cast<double*>(frame.data()));
    frames_.push_back(std::move(frame));
  }
}

Spinor SnapshotSeries::sample(double t, const std::array<int, 3>& node) const {
  const int nt = static_cast<int>(times_.size());
  if (t < times_.front() - 1e-9 || t > times_.back() + 1e-9)
    throw std::out_of_range("sample time outside the recorded snapshot span");

  const int m = win_.m;
  for (int d = 0; d < 3; ++d)
    if (node[d] < win_.lo[d] || node[d] >= win_.lo[d] + m)
      throw std::out_of_range("sample node outside the snapshot window");
  const std::size_t msz = static_cast<std::size_t>(m) * m * m;
  const std::size_t at = (static_cast<std::size_t>(node[0] - win_.lo[0]) * m +
                          (node[1] - win_.lo[1])) *
                             m +
                         (node[2] - win_.lo[2]);

  // Stencil of up to 6 frames straddling t.
  const int stencil = std::min(6, nt);
  int first = static_cast<int>(std::upper_bound(times_.begin(), times_.end(), t) -
                               times_.begin()) -
              stencil / 2;
  first = std::clamp(first, 0, nt - stencil);

  double wts[6];
  for (int k = 0; k < stencil; ++k) {
    double w = 1.0;
    for (int l = 0; l < stencil; ++l) {
      if (l == k) continue;
      w *= (t - times_[first + l]) / (times_[first + k] - times_[first + l]);
    }
    wts[k] = w;
  }

  Spinor out{};
  for (int c = 0; c < 4; ++c) {
    const double tw = (c < 2) ? 1.0 : -1.0;  // exp(+i gamma^0 t) twist per block
    cplx acc = 0.0;
    for (int k = 0; k < stencil; ++k) {
      const cplx twist = std::exp(cplx(0.0, tw * times_[first + k]));
      acc += wts[k] * (twist * frames_[first + k][c * msz + at]);
    }
    out[c] = std::exp(cplx(0.0, -tw * t)) * acc;
  }
  return out;
}

Spinor SnapshotSeries::sample_at(double t, const std::array<double, 3>& x) const {
  return sample(t, {node_of(x[0], L_, h_, n_), node_of(x[1], L_, h_, n_),
                    node_of(x[2], L_, h_, n_)});
}

std::function<Spinor(const SpacetimePoint&)> SnapshotSeries::sampler() const {
  return [this](const SpacetimePoint& p) { return sample_at(p.t, p.x); };
}

}  // namespace mdlab
