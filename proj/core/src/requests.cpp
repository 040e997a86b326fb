#include "trsp/requests.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace trsp {

namespace {

constexpr char kMagic[8] = {'T', 'R', 'S', 'P', 'R', 'E', 'Q', '1'};

void write_i64(std::ostream& out, std::int64_t v) {
  std::array<unsigned char, 8> b;
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  out.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::int64_t read_i64(std::istream& in) {
  std::array<unsigned char, 8> b;
  in.read(reinterpret_cast<char*>(b.data()), 8);
  if (!in) throw std::runtime_error("request matrix: truncated binary input");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
  return static_cast<std::int64_t>(v);
}

}  // namespace

RequestMatrix::RequestMatrix(int n_services, int n_servers, int horizon)
    : s_(n_services), n_(n_servers), t_(horizon) {
  if (s_ < 1 || n_ < 1 || t_ < 1) {
    throw std::invalid_argument("request matrix dimensions must be positive");
  }
  const std::size_t total = std::size_t(s_) * n_ * t_;
  actual_.assign(total, 0);
  predicted_.assign(total, 0);
}

void RequestMatrix::validate() const {
  for (std::int64_t v : actual_) {
    if (v < 0) throw std::invalid_argument("actual request counts must be non-negative");
  }
  for (std::int64_t v : predicted_) {
    if (v < 0) throw std::invalid_argument("predicted request counts must be non-negative");
  }
}

void RequestMatrix::write_binary(std::ostream& out) const {
  out.write(kMagic, sizeof(kMagic));
  write_i64(out, s_);
  write_i64(out, n_);
  write_i64(out, t_);
  for (std::int64_t v : actual_) write_i64(out, v);
  for (std::int64_t v : predicted_) write_i64(out, v);
}

RequestMatrix RequestMatrix::read_binary(std::istream& in) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("request matrix: bad magic, not a TRSPREQ1 file");
  }
  const auto s = read_i64(in), n = read_i64(in), t = read_i64(in);
  if (s < 1 || n < 1 || t < 1 || s > (1 << 20) || n > (1 << 16) || t > (1 << 20)) {
    throw std::runtime_error("request matrix: implausible dimensions");
  }
  RequestMatrix m(static_cast<int>(s), static_cast<int>(n), static_cast<int>(t));
  for (auto& v : m.actual_) v = read_i64(in);
  for (auto& v : m.predicted_) v = read_i64(in);
  m.validate();
  return m;
}

void RequestMatrix::write_csv(std::ostream& out) const {
  out << "service,server,slot,actual,predicted\n";
  for (int t = 1; t <= t_; ++t) {
    for (int j = 1; j <= n_; ++j) {
      for (int i = 0; i < s_; ++i) {
        out << i << ',' << j << ',' << t << ',' << actual(i, j, t) << ','
            << predicted(i, j, t) << '\n';
      }
    }
  }
}

RequestMatrix RequestMatrix::read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "service,server,slot,actual,predicted") {
    throw std::runtime_error("request matrix csv: missing or unexpected header");
  }
  struct Row {
    int i, j, t;
    std::int64_t a, p;
  };
  std::vector<Row> rows;
  int max_i = -1, max_j = 0, max_t = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Row r;
    char c1, c2, c3, c4;
    std::istringstream ss(line);
    if (!(ss >> r.i >> c1 >> r.j >> c2 >> r.t >> c3 >> r.a >> c4 >> r.p) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      throw std::runtime_error("request matrix csv: malformed line " +
                               std::to_string(line_no));
    }
    max_i = std::max(max_i, r.i);
    max_j = std::max(max_j, r.j);
    max_t = std::max(max_t, r.t);
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("request matrix csv: no data rows");
  RequestMatrix m(max_i + 1, max_j, max_t);
  for (const Row& r : rows) {
    m.set_actual(r.i, r.j, r.t, r.a);
    m.set_predicted(r.i, r.j, r.t, r.p);
  }
  m.validate();
  return m;
}

}  // namespace trsp
