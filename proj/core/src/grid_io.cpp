#include "qmod/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace qmod {
namespace {

constexpr char kMagic[8] = {'Q', 'M', 'O', 'D', 'G', 'R', 'I', 'D'};

static_assert(std::endian::native == std::endian::little,
              "binary grid I/O assumes a little-endian host");

template <class T>
T read_pod(std::istream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw std::runtime_error("grid: truncated binary stream");
  return v;
}

template <class T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

// Next token, skipping '#' comments to end of line.
bool next_token(std::istream& in, std::string& tok) {
  while (in >> tok) {
    if (tok.front() != '#') return true;
    std::string rest;
    std::getline(in, rest);
  }
  return false;
}

std::string expect_token(std::istream& in, const char* what) {
  std::string tok;
  if (!next_token(in, tok)) throw std::runtime_error(std::string("grid: missing ") + what);
  return tok;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::runtime_error("grid: bad number '" + s + "'");
  return v;
}

}  // namespace

GridField parse_grid_text(std::istream& in) {
  if (expect_token(in, "magic") != "qmod-grid") throw std::runtime_error("grid: bad text magic");
  if (expect_token(in, "version") != "1") throw std::runtime_error("grid: unsupported version");
  if (expect_token(in, "dim keyword") != "dim") throw std::runtime_error("grid: expected 'dim'");
  const int n = std::stoi(expect_token(in, "dimension"));
  if (n < 2 || n > 8) throw std::runtime_error("grid: dimension must be in [2, 8]");
  Point lo(n), hi(n);
  std::vector<std::size_t> counts(n);
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (expect_token(in, "axis keyword") != "axis") throw std::runtime_error("grid: expected 'axis'");
    lo[i] = to_double(expect_token(in, "axis lo"));
    hi[i] = to_double(expect_token(in, "axis hi"));
    counts[i] = static_cast<std::size_t>(std::stoull(expect_token(in, "axis count")));
    total *= counts[i];
  }
  std::vector<double> values;
  values.reserve(total);
  std::string tok;
  while (values.size() < total && next_token(in, tok)) values.push_back(to_double(tok));
  if (values.size() != total) throw std::runtime_error("grid: fewer values than header promises");
  if (next_token(in, tok)) throw std::runtime_error("grid: trailing data after values");
  return GridField(std::move(lo), std::move(hi), std::move(counts), std::move(values));
}

GridField parse_grid_binary(std::istream& in) {
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("grid: bad binary magic");
  if (read_pod<std::uint32_t>(in) != 1) throw std::runtime_error("grid: unsupported version");
  const auto n = read_pod<std::uint32_t>(in);
  if (n < 2 || n > 8) throw std::runtime_error("grid: dimension must be in [2, 8]");
  Point lo(n), hi(n);
  std::vector<std::size_t> counts(n);
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    lo[i] = read_pod<double>(in);
    hi[i] = read_pod<double>(in);
    counts[i] = static_cast<std::size_t>(read_pod<std::uint64_t>(in));
    total *= counts[i];
  }
  std::vector<double> values(total);
  in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(total * sizeof(double)));
  if (!in) throw std::runtime_error("grid: truncated value block");
  return GridField(std::move(lo), std::move(hi), std::move(counts), std::move(values));
}

void write_grid_text(std::ostream& out, const GridField& g) {
  std::ostringstream buf;
  buf.precision(17);
  buf << "qmod-grid 1\ndim " << g.dimension() << '\n';
  for (int i = 0; i < g.dimension(); ++i) {
    buf << "axis " << g.lo()[i] << ' ' << g.hi()[i] << ' ' << g.counts()[i] << '\n';
  }
  const std::size_t row = g.counts().back();
  for (std::size_t k = 0; k < g.values().size(); ++k) {
    buf << g.values()[k] << ((k + 1) % row == 0 ? '\n' : ' ');
  }
  out << buf.str();
}

void write_grid_binary(std::ostream& out, const GridField& g) {
  out.write(kMagic, 8);
  write_pod<std::uint32_t>(out, 1);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(g.dimension()));
  for (int i = 0; i < g.dimension(); ++i) {
    write_pod<double>(out, g.lo()[i]);
    write_pod<double>(out, g.hi()[i]);
    write_pod<std::uint64_t>(out, g.counts()[i]);
  }
  out.write(reinterpret_cast<const char*>(g.values().data()),
            static_cast<std::streamsize>(g.values().size() * sizeof(double)));
}

GridField read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("grid: cannot open " + path.string());
  char magic[8] = {};
  in.read(magic, 8);
  const bool binary = in.gcount() == 8 && std::memcmp(magic, kMagic, 8) == 0;
  in.clear();
  in.seekg(0);
  return binary ? parse_grid_binary(in) : parse_grid_text(in);
}

}  // namespace qmod
