#include "tidal/io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <type_traits>

namespace tidal {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const CsvTable& table) {
  for (std::size_t c = 0; c < table.header.size(); ++c) os << (c ? "," : "") << table.header[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
  for (const auto& line : table.comments) os << "# " << line << '\n';
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream os;
  write_csv(os, table);
  return os.str();
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream is(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.rfind("# ", 0) == 0) {
      t.comments.push_back(line.substr(2));
      continue;
    }
    if (!t.comments.empty()) throw ValidationError("csv", "data after footer comments at line " + std::to_string(line_no));
    if (t.header.empty()) {
      t.header = split(line);
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != t.header.size())
      throw ValidationError("csv", "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                       " cells, header has " + std::to_string(t.header.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) {
      double v = 0.0;
      const auto res = std::from_chars(c.data(), c.data() + c.size(), v);
      if (res.ec != std::errc() || res.ptr != c.data() + c.size())
        throw ValidationError("csv", "bad number '" + c + "' at line " + std::to_string(line_no));
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) throw ValidationError("csv", "missing header row");
  return t;
}

namespace {

std::vector<std::string> columns(bool deviation) {
  std::vector<std::string> h{"t"};
  for (const char* prefix : {"x", "y", "w", "v"}) {
    if (!deviation && (prefix[0] == 'w' || prefix[0] == 'v')) break;
    for (int i = 0; i < kDim; ++i) h.push_back(prefix + std::to_string(i));
  }
  return h;
}

void append(std::vector<double>& row, const Vec4<>& v) { row.insert(row.end(), v.begin(), v.end()); }

void footer(CsvTable& t, const Truncation& tr) {
  if (tr.truncated) t.comments.push_back("truncated: " + tr.reason + " at t=" + format_double(tr.t));
}

}  // namespace

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t;
  t.header = columns(false);
  for (const auto& s : traj.samples) {
    std::vector<double> row{s.t};
    append(row, s.x);
    append(row, s.y);
    t.rows.push_back(std::move(row));
  }
  footer(t, traj.truncation);
  return t;
}

CsvTable deviation_table(const DeviationTrajectory& traj) {
  CsvTable t;
  t.header = columns(true);
  for (const auto& s : traj.samples) {
    std::vector<double> row{s.t};
    append(row, s.x);
    append(row, s.y);
    append(row, s.w);
    append(row, s.v);
    t.rows.push_back(std::move(row));
  }
  footer(t, traj.truncation);
  return t;
}

namespace {

std::string json_number(double v) { return std::isfinite(v) ? format_double(v) : "null"; }

// Innermost arrays on one line, outer levels indented.
template <class T>
void put(std::ostream& os, const T& t, int indent) {
  if constexpr (std::is_arithmetic_v<T>) {
    os << json_number(static_cast<double>(t));
  } else if constexpr (std::is_arithmetic_v<typename T::value_type>) {
    os << '[';
    for (std::size_t k = 0; k < t.size(); ++k) os << (k ? ", " : "") << json_number(t[k]);
    os << ']';
  } else {
    const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
    os << "[\n";
    for (std::size_t k = 0; k < t.size(); ++k) {
      os << pad;
      put(os, t[k], indent + 2);
      os << (k + 1 < t.size() ? ",\n" : "\n");
    }
    os << std::string(static_cast<std::size_t>(indent), ' ') << ']';
  }
}

class ObjectWriter {
 public:
  ObjectWriter(std::ostream& os, int indent) : os_(os), indent_(indent) { os_ << "{\n"; }
  template <class T>
  void field(const char* key, const T& value) {
    begin(key);
    put(os_, value, indent_ + 2);
  }
  std::ostream& begin(const char* key) {
    os_ << (first_ ? "" : ",\n") << std::string(static_cast<std::size_t>(indent_ + 2), ' ') << '"' << key << "\": ";
    first_ = false;
    return os_;
  }
  void close() { os_ << '\n' << std::string(static_cast<std::size_t>(indent_), ' ') << '}'; }

 private:
  std::ostream& os_;
  int indent_;
  bool first_ = true;
};

}  // namespace

std::string packet_to_json(const TidalPacket& pk) {
  const auto& c = pk.connection;
  std::ostringstream os;
  ObjectWriter top(os, 0);
  top.begin("point");
  {
    ObjectWriter p(os, 2);
    p.field("x", pk.point.x);
    p.field("y", pk.point.y);
    p.field("norm", pk.point.norm);
    p.field("sign", pk.point.sign);
    p.close();
  }
  top.field("alpha", c.alpha);
  top.begin("connection");
  {
    ObjectWriter w(os, 2);
    w.field("l_up", c.l_up);
    w.field("l_down", c.l_down);
    w.field("h", c.h);
    w.field("gamma", c.gamma);
    w.field("F", c.F);
    w.field("F_mixed", c.F_mixed);
    w.field("F_y", c.F_y);
    w.field("B", c.B);
    w.field("B_j", c.Bj);
    w.field("B_jk", c.Bjk);
    w.field("G", c.G);
    w.field("N", c.N);
    w.field("G_jk", c.Gjk);
    w.close();
  }
  top.field("R", pk.R);
  top.field("E", pk.E);
  top.field("E_tilde", pk.E_tilde);
  top.field("trace_E", pk.trace_E);
  top.field("e", pk.e);
  top.field("torsion", pk.torsion);
  top.field("ricci", pk.d.ricci);
  top.field("base_ricci", pk.base.ricci);
  top.close();
  os << '\n';
  return os.str();
}

}  // namespace tidal
