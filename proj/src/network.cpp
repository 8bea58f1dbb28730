#include "netcomp/network.hpp"

#include "netcomp/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>

namespace netcomp {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

template <typename T>
T parse_number(const std::string& field, std::size_t line_no) {
  T value{};
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (!field.empty() && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("line " + std::to_string(line_no) + ": cannot parse '" + field + "'");
  }
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

LiabilityNetwork::LiabilityNetwork(Matrix liabilities) : liabilities_(std::move(liabilities)) {
  const auto n = liabilities_.rows();
  if (liabilities_.cols() != n + 1) {
    throw ValidationError("liability matrix must be n x (n+1), got " + std::to_string(n) + " x " +
                          std::to_string(liabilities_.cols()));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= n; ++j) {
      const double v = liabilities_(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw ValidationError("liability from bank " + std::to_string(i + 1) + " to node " +
                              std::to_string(j) + " must be finite and nonnegative, got " +
                              format_double(v));
      }
    }
    if (liabilities_(i, i + 1) != 0.0) {
      throw ValidationError("bank " + std::to_string(i + 1) + " has an obligation to itself");
    }
  }
}

LiabilityNetwork LiabilityNetwork::from_blocks(const Matrix& interbank, const Vector& societal) {
  const auto n = interbank.rows();
  if (interbank.cols() != n || societal.size() != n) {
    throw ValidationError("interbank block must be n x n with an n-vector of societal obligations");
  }
  Matrix full(n, n + 1);
  full.col(0) = societal;
  full.rightCols(n) = interbank;
  return LiabilityNetwork(std::move(full));
}

Matrix LiabilityNetwork::interbank_block() const {
  return liabilities_.rightCols(liabilities_.cols() - 1);
}

RelativeLiabilities relative_liabilities(const LiabilityNetwork& network) {
  RelativeLiabilities rel;
  rel.pbar = network.total_obligations();
  rel.pi = Matrix::Zero(network.matrix().rows(), network.matrix().cols());
  for (Eigen::Index i = 0; i < rel.pbar.size(); ++i) {
    if (rel.pbar(i) > 0.0) rel.pi.row(i) = network.matrix().row(i) / rel.pbar(i);
  }
  return rel;
}

Vector net_positions(const LiabilityNetwork& network) {
  const Matrix inter = network.interbank_block();
  return inter.rowwise().sum() - inter.colwise().sum().transpose() + network.societal_column();
}

void ThreeBankParams::validate() const {
  if (!(x[0] <= x[1] && x[1] <= x[2])) throw ValidationError("three-bank multipliers must satisfy x1 <= x2 <= x3");
  if (x[0] < 0.0) throw ValidationError("three-bank multipliers must be nonnegative");
  if (!(y >= 0.0)) throw ValidationError("societal obligation y must be nonnegative");
  if (!(lambda >= 0.0) || !(xi >= 0.0)) throw ValidationError("cycle weights must be nonnegative");
}

LiabilityNetwork complete_regular_network(std::size_t n, double y) {
  if (n < 2) throw ValidationError("complete network needs at least two banks");
  if (!(y >= 0.0)) throw ValidationError("societal obligation must be nonnegative");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix inter = Matrix::Constant(m, m, 1.0 / static_cast<double>(n - 1));
  inter.diagonal().setZero();
  return LiabilityNetwork::from_blocks(inter, Vector::Constant(m, y));
}

LiabilityNetwork ring_network(const std::vector<std::size_t>& cycle, double y) {
  const std::size_t n = cycle.size();
  if (n < 2) throw ValidationError("ring needs at least two banks");
  if (!(y >= 0.0)) throw ValidationError("societal obligation must be nonnegative");
  std::vector<bool> seen(n, false);
  for (std::size_t id : cycle) {
    if (id < 1 || id > n || seen[id - 1]) {
      throw ValidationError("ring order must be a permutation of 1..n");
    }
    seen[id - 1] = true;
  }
  const auto m = static_cast<Eigen::Index>(n);
  Matrix inter = Matrix::Zero(m, m);
  for (std::size_t k = 0; k < n; ++k) {
    inter(static_cast<Eigen::Index>(cycle[k] - 1), static_cast<Eigen::Index>(cycle[(k + 1) % n] - 1)) = 1.0;
  }
  return LiabilityNetwork::from_blocks(inter, Vector::Constant(m, y));
}

LiabilityNetwork fully_compressed_network(std::size_t n, double y) {
  if (n < 1) throw ValidationError("network needs at least one bank");
  if (!(y >= 0.0)) throw ValidationError("societal obligation must be nonnegative");
  const auto m = static_cast<Eigen::Index>(n);
  return LiabilityNetwork::from_blocks(Matrix::Zero(m, m), Vector::Constant(m, y));
}

LiabilityNetwork three_bank_network(const ThreeBankParams& params) {
  params.validate();
  Matrix inter = Matrix::Zero(3, 3);
  inter(0, 1) = inter(1, 2) = inter(2, 0) = params.lambda;
  inter(0, 2) = inter(2, 1) = inter(1, 0) = params.xi;
  return LiabilityNetwork::from_blocks(inter, Vector::Constant(3, params.y));
}

NetworkFormat parse_network_format(const std::string& name) {
  if (name == "auto") return NetworkFormat::kAuto;
  if (name == "csv") return NetworkFormat::kCsv;
  if (name == "json") return NetworkFormat::kJson;
  throw ValidationError("unknown network format '" + name + "'");
}

LiabilityNetwork parse_network_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t declared_n = 0;
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  std::size_t max_id = 0;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      // "# n=K" fixes the bank count so isolated banks survive a round trip.
      std::string body = trim(std::string_view(line).substr(1));
      if (body.rfind("n=", 0) == 0 || body.rfind("n =", 0) == 0) {
        declared_n = parse_number<std::size_t>(trim(body.substr(body.find('=') + 1)), line_no);
      }
      continue;
    }
    if (!header_seen) {
      std::string lower = line;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
      lower.erase(std::remove(lower.begin(), lower.end(), ' '), lower.end());
      if (lower != "from,to,amount") {
        throw ParseError("line " + std::to_string(line_no) + ": expected header 'from,to,amount'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 3 fields, got " +
                       std::to_string(fields.size()));
    }
    const auto from = parse_number<std::size_t>(fields[0], line_no);
    const auto to = parse_number<std::size_t>(fields[1], line_no);
    const auto amount = parse_number<double>(fields[2], line_no);
    if (from == 0) throw ValidationError("line " + std::to_string(line_no) + ": society has no outgoing obligations");
    if (from == to) throw ValidationError("line " + std::to_string(line_no) + ": self-obligation of bank " + std::to_string(from));
    if (!std::isfinite(amount) || amount < 0.0) {
      throw ValidationError("line " + std::to_string(line_no) + ": negative or non-finite amount");
    }
    if (!edges.emplace(std::make_pair(from, to), amount).second) {
      throw ValidationError("line " + std::to_string(line_no) + ": duplicate edge " + std::to_string(from) +
                            "->" + std::to_string(to));
    }
    max_id = std::max({max_id, from, to});
  }
  if (!header_seen) throw ParseError("missing header 'from,to,amount'");
  if (declared_n != 0 && max_id > declared_n) {
    throw ValidationError("node id " + std::to_string(max_id) + " exceeds declared bank count " +
                          std::to_string(declared_n));
  }
  const std::size_t n = declared_n != 0 ? declared_n : max_id;
  if (n == 0) throw ValidationError("network has no banks");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix full = Matrix::Zero(m, m + 1);
  for (const auto& [key, amount] : edges) {
    full(static_cast<Eigen::Index>(key.first - 1), static_cast<Eigen::Index>(key.second)) = amount;
  }
  return LiabilityNetwork(std::move(full));
}

LiabilityNetwork parse_network_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("liabilities")) {
    throw ParseError("JSON network needs 'n' and 'liabilities'");
  }
  if (!doc["n"].is_number_unsigned()) throw ParseError("'n' must be a positive integer");
  const auto n = doc["n"].get<std::size_t>();
  const auto& rows = doc["liabilities"];
  if (!rows.is_array() || rows.size() != n) throw ParseError("'liabilities' must have n rows");
  const auto m = static_cast<Eigen::Index>(n);
  Matrix full(m, m + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != n + 1) {
      throw ParseError("row " + std::to_string(i + 1) + " must have n+1 entries");
    }
    for (std::size_t j = 0; j <= n; ++j) {
      if (!row[j].is_number()) throw ParseError("non-numeric entry in row " + std::to_string(i + 1));
      full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j].get<double>();
    }
  }
  return LiabilityNetwork(std::move(full));
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string network_to_csv(const LiabilityNetwork& network) {
  std::ostringstream out;
  const auto n = network.size();
  out << "# n=" << n << "\n";
  out << "from,to,amount\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= n; ++j) {
      const double v = network.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v != 0.0) out << (i + 1) << ',' << j << ',' << format_double(v) << '\n';
    }
  }
  return out.str();
}

std::string network_to_json(const LiabilityNetwork& network) {
  nlohmann::json doc;
  doc["n"] = network.size();
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < network.matrix().rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < network.matrix().cols(); ++j) row.push_back(network.matrix()(i, j));
    rows.push_back(std::move(row));
  }
  doc["liabilities"] = std::move(rows);
  return doc.dump(2) + "\n";
}

namespace {

NetworkFormat resolve(NetworkFormat format, const std::filesystem::path& path) {
  if (format != NetworkFormat::kAuto) return format;
  return path.extension() == ".json" ? NetworkFormat::kJson : NetworkFormat::kCsv;
}

}  // namespace

LiabilityNetwork load_network(const std::filesystem::path& path, NetworkFormat format) {
  const std::string text = read_file(path);
  return resolve(format, path) == NetworkFormat::kJson ? parse_network_json(text) : parse_network_csv(text);
}

void save_network(const LiabilityNetwork& network, const std::filesystem::path& path, NetworkFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << (resolve(format, path) == NetworkFormat::kJson ? network_to_json(network) : network_to_csv(network));
}

}  // namespace netcomp
