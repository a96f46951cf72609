#pragma once

#include <fstream>
#include <string>

#include "tubal/tensor.hpp"

namespace tubal {

// TNS3 container: one ASCII header line "TNS3 n1 n2 n3\n" followed by
// n1*n2*n3 float64 values in storage order (slice-major, row-major).
// Values are written raw, which is little-endian on every platform we
// target.

inline void write_tns3(const std::string& path, const Tensor3d& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("write_tns3: cannot open " + path);
  f << "TNS3 " << t.n1() << " " << t.n2() << " " << t.n3() << "\n";
  f.write(reinterpret_cast<const char*>(t.data()),
          std::streamsize(sizeof(double)) * t.size());
  if (!f) throw IoError("write_tns3: short write to " + path);
}

inline Tensor3d read_tns3(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("read_tns3: cannot open " + path);
  std::string magic;
  long long n1 = 0, n2 = 0, n3 = 0;
  f >> magic >> n1 >> n2 >> n3;
  if (!f || magic != "TNS3" || f.get() != '\n')
    throw IoError("read_tns3: bad header in " + path);
  if (n1 <= 0 || n2 <= 0 || n3 <= 0)
    throw IoError("read_tns3: bad dimensions in " + path);
  Tensor3d t(n1, n2, n3);
  const std::streamsize want = std::streamsize(sizeof(double)) * t.size();
  f.read(reinterpret_cast<char*>(t.data()), want);
  if (f.gcount() != want)
    throw IoError("read_tns3: truncated payload in " + path);
  if (f.peek() != std::ifstream::traits_type::eof())
    throw IoError("read_tns3: trailing bytes in " + path);
  if (!t.all_finite())
    throw IoError("read_tns3: non-finite values in " + path);
  return t;
}

}  // namespace tubal
