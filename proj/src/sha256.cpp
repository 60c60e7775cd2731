#include "fid/util/sha256.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "fid/util/error.hpp"

namespace fid {

namespace {

std::string to_hex(const unsigned char* digest, unsigned len) {
  static const char* hexd = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (unsigned i = 0; i < len; ++i) {
    out[2 * i] = hexd[digest[i] >> 4];
    out[2 * i + 1] = hexd[digest[i] & 0xf];
  }
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error(errc::io_error, "sha256 digest failed");
  return to_hex(digest, len);
}

std::string sha256_file_hex(const std::string& path) {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> fp(std::fopen(path.c_str(), "rb"),
                                                     std::fclose);
  if (!fp) throw Error(errc::io_error, "cannot open file for hashing: " + path);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
    throw Error(errc::io_error, "sha256 digest failed");
  std::vector<unsigned char> buf(1 << 16);
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), fp.get())) > 0) {
    if (EVP_DigestUpdate(ctx.get(), buf.data(), n) != 1)
      throw Error(errc::io_error, "sha256 digest failed");
  }
  if (EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
    throw Error(errc::io_error, "sha256 digest failed");
  return to_hex(digest, len);
}

}  // namespace fid
