#include "siglab/digest.hpp"

#include <openssl/evp.h>

#include <memory>

#include "siglab/error.hpp"

namespace siglab {

namespace {

struct CtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const noexcept { EVP_MD_CTX_free(ctx); }
};

}  // namespace

Digest sha256(std::initializer_list<std::span<const std::uint8_t>> parts) {
  thread_local std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx{EVP_MD_CTX_new()};
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::Io, "SHA-256 initialisation failed");
  }
  for (const auto part : parts) {
    if (!part.empty()) EVP_DigestUpdate(ctx.get(), part.data(), part.size());
  }
  Digest out{};
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), out.data(), &len);
  return out;
}

Digest sha256(std::span<const std::uint8_t> data) { return sha256({data}); }

std::vector<std::uint8_t> expand_bytes(std::string_view label, std::size_t count) {
  std::vector<std::uint8_t> out;
  out.reserve(count + 32);
  const std::span<const std::uint8_t> label_bytes(reinterpret_cast<const std::uint8_t*>(label.data()), label.size());
  for (std::uint32_t block = 0; out.size() < count; ++block) {
    const std::array<std::uint8_t, 4> ctr{static_cast<std::uint8_t>(block >> 24), static_cast<std::uint8_t>(block >> 16),
                                          static_cast<std::uint8_t>(block >> 8), static_cast<std::uint8_t>(block)};
    const Digest d = sha256({label_bytes, ctr});
    out.insert(out.end(), d.begin(), d.end());
  }
  out.resize(count);
  return out;
}

}  // namespace siglab
