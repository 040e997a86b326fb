#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace trsp {

/// Read-only view of one slot of one tensor; (service, server) -> count.
class SlotRequests {
 public:
  SlotRequests(const std::int64_t* base, int n_services)
      : base_(base), s_(n_services) {}

  std::int64_t operator()(int service, int server) const {
    return base_[(server - 1) * s_ + service];
  }

 private:
  const std::int64_t* base_;
  int s_;
};

/// Actual and predicted request counts per (service, server, slot).
/// Solvers read only the predicted tensor; cost evaluation reads only the
/// actual tensor.
class RequestMatrix {
 public:
  RequestMatrix(int n_services, int n_servers, int horizon);

  int n_services() const { return s_; }
  int n_servers() const { return n_; }
  int horizon() const { return t_; }

  /// i in 0..s-1, j in 1..n, t in 1..T.
  std::int64_t actual(int i, int j, int t) const { return actual_[index(i, j, t)]; }
  std::int64_t predicted(int i, int j, int t) const { return predicted_[index(i, j, t)]; }

  void set_actual(int i, int j, int t, std::int64_t v) { actual_[index(i, j, t)] = v; }
  void set_predicted(int i, int j, int t, std::int64_t v) { predicted_[index(i, j, t)] = v; }

  SlotRequests actual_slot(int t) const {
    return SlotRequests(actual_.data() + std::size_t(t - 1) * s_ * n_, s_);
  }
  SlotRequests predicted_slot(int t) const {
    return SlotRequests(predicted_.data() + std::size_t(t - 1) * s_ * n_, s_);
  }

  /// Throws std::invalid_argument on negative entries.
  void validate() const;

  bool operator==(const RequestMatrix& other) const = default;

  /// Compact little-endian binary artifact ("TRSPREQ1" magic).
  void write_binary(std::ostream& out) const;
  static RequestMatrix read_binary(std::istream& in);

  /// CSV artifact: header + one row per (service, server, slot).
  void write_csv(std::ostream& out) const;
  static RequestMatrix read_csv(std::istream& in);

 private:
  std::size_t index(int i, int j, int t) const {
    return (std::size_t(t - 1) * n_ + (j - 1)) * s_ + i;
  }

  int s_, n_, t_;
  std::vector<std::int64_t> actual_;
  std::vector<std::int64_t> predicted_;
};

}  // namespace trsp
