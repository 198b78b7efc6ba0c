#include "dfp/trace.hpp"

#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

namespace dfp {

std::string TraceRecord::to_line() const {
    std::string line = fmt::format(
        R"({{"seq":{},"t":{},"kind":"{}","commitment":{},"step":{},"sign_offs":{},"required":{},"status":"{}")", seq,
        at, kind, commitment, step, sign_offs, required, status);
    if (node)
        line += fmt::format(R"(,"node":{})", node->value);
    line += '}';
    return line;
}

struct TraceLog::Hasher {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();

    Hasher() {
        if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256 init failed");
    }
    ~Hasher() { EVP_MD_CTX_free(ctx); }
    Hasher(const Hasher&) = delete;
    Hasher& operator=(const Hasher&) = delete;
};

TraceLog::TraceLog(bool retain) : hasher_(std::make_unique<Hasher>()), retain_(retain) {}
TraceLog::~TraceLog() = default;
TraceLog::TraceLog(TraceLog&&) noexcept = default;
TraceLog& TraceLog::operator=(TraceLog&&) noexcept = default;

std::uint64_t TraceLog::append(TraceRecord record) {
    record.seq = next_seq_++;
    std::string line = record.to_line();
    line += '\n';
    EVP_DigestUpdate(hasher_->ctx, line.data(), line.size());
    if (sink_)
        sink_->write(line.data(), static_cast<std::streamsize>(line.size()));
    if (retain_)
        records_.push_back(std::move(record));
    return next_seq_ - 1;
}

std::string TraceLog::digest_hex() const {
    EVP_MD_CTX* copy = EVP_MD_CTX_new();
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!copy || EVP_MD_CTX_copy_ex(copy, hasher_->ctx) != 1 || EVP_DigestFinal_ex(copy, out, &len) != 1) {
        EVP_MD_CTX_free(copy);
        throw std::runtime_error("sha256 finalize failed");
    }
    EVP_MD_CTX_free(copy);
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i)
        hex += fmt::format("{:02x}", out[i]);
    return hex;
}

} // namespace dfp
