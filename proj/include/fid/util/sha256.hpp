// SHA-256 hex digests for output-manifest integrity entries.
#pragma once

#include <string>

namespace fid {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file_hex(const std::string& path);

}  // namespace fid
