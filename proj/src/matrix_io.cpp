#include "pdpca/matrix_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "pdpca/errors.hpp"

namespace pdpca {

namespace {

constexpr std::array<char, 4> kMagic = {'P', 'D', 'M', '1'};

void put_u64(std::ostream& out, std::uint64_t value) {
  std::array<char, 8> bytes{};
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& in) {
  std::array<unsigned char, 8> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) fail(ErrorKind::Io, "PDM1: truncated header");
  std::uint64_t value = 0;
  for (int i = 7; i >= 0; --i) value = (value << 8) | bytes[i];
  return value;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return in;
}

}  // namespace

DataMatrix read_pdm1(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) fail(ErrorKind::Io, "PDM1: bad magic");
  const std::uint64_t rows = get_u64(in);
  const std::uint64_t cols = get_u64(in);
  if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols)
    fail(ErrorKind::Io, "PDM1: implausible shape");
  std::vector<double> data(rows * cols);
  for (double& x : data) x = std::bit_cast<double>(get_u64(in));
  return DataMatrix(rows, cols, std::move(data));
}

void write_pdm1(std::ostream& out, const DataMatrix& m) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, m.rows());
  put_u64(out, m.cols());
  for (double x : m.entries()) put_u64(out, std::bit_cast<std::uint64_t>(x));
  if (!out) fail(ErrorKind::Io, "PDM1: write failed");
}

DataMatrix read_pdm1(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pdm1(in);
}

void write_pdm1(const std::filesystem::path& path, const DataMatrix& m) {
  std::ostringstream buf(std::ios::binary);
  write_pdm1(buf, m);
  write_file_atomic(path, buf.str());
}

DataMatrix read_csv_matrix(std::istream& in) {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::size_t count = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::string field = line.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
      try {
        std::size_t used = 0;
        data.push_back(std::stod(field, &used));
        if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(field);
      } catch (const std::exception&) {
        fail(ErrorKind::Io, "CSV: bad number '" + field + "' on row " + std::to_string(rows + 1));
      }
      ++count;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (rows == 0) cols = count;
    else if (count != cols)
      fail(ErrorKind::Io, "CSV: row " + std::to_string(rows + 1) + " has " + std::to_string(count) +
                              " fields, expected " + std::to_string(cols));
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::Io, "CSV: empty matrix");
  return DataMatrix(rows, cols, std::move(data));
}

DataMatrix read_csv_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_csv_matrix(in);
}

DataMatrix load_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  const bool is_pdm1 = in && magic == kMagic;
  in.clear();
  in.seekg(0);
  return is_pdm1 ? read_pdm1(in) : read_csv_matrix(in);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) fail(ErrorKind::Io, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Io, "rename to " + path.string() + " failed: " + ec.message());
}

}  // namespace pdpca
