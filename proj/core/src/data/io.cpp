#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "iikl/data/data.hpp"
#include "iikl/error.hpp"

namespace iikl::data {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_line(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view cell) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double v = 0.0;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
  if (ec != std::errc() || ptr != end || cell.empty()) return std::nullopt;
  return v;
}

std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> out;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto pos = rest.find('\n');
    out.push_back(rest.substr(0, pos));
    if (pos == std::string_view::npos) break;
    rest.remove_prefix(pos + 1);
  }
  return out;
}

std::string location(const std::string& source, std::size_t row, std::size_t col) {
  return source + ": row " + std::to_string(row) + ", column " + std::to_string(col);
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

}  // namespace

Dataset parse_csv(const std::string& text, const std::optional<LabelColumn>& label,
                  const std::string& source) {
  auto lines = lines_of(text);
  if (!text.empty() && text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    lines.front().remove_prefix(3);
  }
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    rows.emplace_back(i + 1, split_line(lines[i], ','));
  }
  if (rows.empty()) throw LoadError(source + ": no data rows");

  Dataset ds;
  ds.provenance = source;
  const auto& first = rows.front().second;
  const bool header = std::none_of(first.begin(), first.end(),
                                   [](std::string_view c) { return parse_number(c).has_value(); });
  std::vector<std::string> names;
  if (header) {
    for (const auto c : first) names.push_back(unquote(c));
    rows.erase(rows.begin());
    if (rows.empty()) throw LoadError(source + ": header but no data rows");
  }
  const std::size_t cols = rows.front().second.size();

  int label_col = -1;
  if (label) {
    if (const auto* name = std::get_if<std::string>(&*label)) {
      const auto it = std::find(names.begin(), names.end(), *name);
      if (it == names.end()) throw LoadError(source + ": no column named '" + *name + "'");
      label_col = static_cast<int>(it - names.begin());
    } else {
      label_col = std::get<int>(*label);
      if (label_col < 0 || static_cast<std::size_t>(label_col) >= cols) {
        throw LoadError(source + ": label column " + std::to_string(label_col) + " out of range");
      }
    }
  }
  if (header && names.size() != cols) {
    throw LoadError(source + ": header has " + std::to_string(names.size()) + " columns but row " +
                    std::to_string(rows.front().first) + " has " + std::to_string(cols));
  }
  const auto width = static_cast<Eigen::Index>(cols) - (label_col >= 0 ? 1 : 0);
  if (width < 1) throw LoadError(source + ": no feature columns");

  ds.X.resize(static_cast<Eigen::Index>(rows.size()), width);
  std::vector<int> labels;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [line_no, cells] = rows[r];
    if (cells.size() != cols) {
      throw LoadError(location(source, line_no, cells.size()) + ": expected " + std::to_string(cols) +
                      " columns, found " + std::to_string(cells.size()));
    }
    Eigen::Index out_col = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw LoadError(location(source, line_no, c + 1) + ": non-numeric cell '" + std::string(cells[c]) + "'");
      }
      if (!std::isfinite(*v)) throw LoadError(location(source, line_no, c + 1) + ": non-finite value");
      if (static_cast<int>(c) == label_col) {
        if (*v != std::round(*v)) throw LoadError(location(source, line_no, c + 1) + ": label is not an integer");
        labels.push_back(static_cast<int>(*v));
      } else {
        ds.X(static_cast<Eigen::Index>(r), out_col++) = *v;
      }
    }
  }
  if (label_col >= 0) {
    ds.labels = std::move(labels);
    if (header) names.erase(names.begin() + label_col);
  }
  ds.feature_names = std::move(names);
  return ds;
}

Dataset load_csv(const std::string& path, const std::optional<LabelColumn>& label) {
  return parse_csv(read_file(path), label, path);
}

Dataset parse_off(const std::string& text, const std::string& source) {
  std::vector<std::pair<std::size_t, std::string_view>> lines;
  const auto raw = lines_of(text);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    auto line = raw[i];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) lines.emplace_back(i + 1, line);
  }
  const auto tokens = [](std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
      const auto start = line.find_first_not_of(" \t", pos);
      if (start == std::string_view::npos) break;
      const auto end = line.find_first_of(" \t", start);
      out.push_back(line.substr(start, end == std::string_view::npos ? end : end - start));
      pos = end == std::string_view::npos ? line.size() : end;
    }
    return out;
  };
  if (lines.empty()) throw LoadError(source + ": empty OFF file");
  auto head = tokens(lines.front().second);
  if (head.empty() || head.front() != "OFF") throw LoadError(source + ": missing OFF header");
  std::size_t cursor = 1;
  std::vector<std::string_view> counts(head.begin() + 1, head.end());
  if (counts.empty()) {
    if (lines.size() < 2) throw LoadError(source + ": missing vertex/face counts");
    counts = tokens(lines[cursor++].second);
  }
  const auto count = [&](std::size_t i) {
    const auto v = i < counts.size() ? parse_number(counts[i]) : std::nullopt;
    if (!v || *v < 0 || *v != std::round(*v)) throw LoadError(source + ": malformed vertex/face counts");
    return static_cast<std::size_t>(*v);
  };
  if (counts.size() < 2 || counts.size() > 3) throw LoadError(source + ": malformed vertex/face counts");
  const std::size_t nv = count(0);
  const std::size_t nf = count(1);
  if (nv == 0) throw LoadError(source + ": OFF file declares no vertices");
  if (lines.size() - cursor != nv + nf) {
    throw LoadError(source + ": header declares " + std::to_string(nv) + " vertices and " + std::to_string(nf) +
                    " faces but the body has " + std::to_string(lines.size() - cursor) + " entries");
  }

  Dataset ds;
  ds.provenance = source;
  ds.X.resize(static_cast<Eigen::Index>(nv), 3);
  for (std::size_t v = 0; v < nv; ++v) {
    const auto& [line_no, line] = lines[cursor + v];
    const auto t = tokens(line);
    if (t.size() < 3) throw LoadError(location(source, line_no, t.size()) + ": vertex needs three coordinates");
    for (int c = 0; c < 3; ++c) {
      const auto x = parse_number(t[static_cast<std::size_t>(c)]);
      if (!x || !std::isfinite(*x)) {
        throw LoadError(location(source, line_no, static_cast<std::size_t>(c) + 1) + ": invalid coordinate");
      }
      ds.X(static_cast<Eigen::Index>(v), c) = *x;
    }
  }
  return ds;
}

Dataset load_off(const std::string& path) { return parse_off(read_file(path), path); }

std::string format_csv(const Matrix& m, const std::vector<std::string>& header) {
  std::ostringstream out;
  out << std::setprecision(17);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  if (!header.empty()) out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m(r, c);
    out << '\n';
  }
  return out.str();
}

void save_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write '" + path + "'");
  out << format_csv(m, header);
  if (!out) throw LoadError("failed writing '" + path + "'");
}

}  // namespace iikl::data
