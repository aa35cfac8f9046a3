#pragma once
// Loopback JSON API over a read-only corpus index: batched vector search and
// document visits. The index is immutable, so concurrent requests share it
// without locks. Stable error codes: bad_request, not_found, over_limit.

#include "kgbench/corpus.hpp"

#include <memory>
#include <string>

namespace kgbench {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 0; // 0 -> pick any free port
    std::size_t max_batch = 32;  // queries per search request
    std::size_t max_top_k = 100; // per-query result ceiling
};

class ToolService {
  public:
    // The index must outlive the service.
    ToolService(const CorpusIndex& index, ServiceConfig cfg = {});
    ~ToolService();
    ToolService(const ToolService&) = delete;
    ToolService& operator=(const ToolService&) = delete;

    // Binds and serves on a background thread; throws CorpusError if the
    // port cannot be bound. Idempotent stop.
    void start();
    void stop();
    bool running() const;
    int port() const; // bound port, valid after start()

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace kgbench
