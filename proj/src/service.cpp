#include "kgbench/service.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

namespace kgbench {

using nlohmann::json;

struct ToolService::Impl {
    const CorpusIndex& index;
    ServiceConfig cfg;
    httplib::Server server;
    std::thread worker;
    std::atomic<bool> running{false};
    int bound_port = 0;

    Impl(const CorpusIndex& idx, ServiceConfig c) : index(idx), cfg(std::move(c)) {
        server.Post("/search", [this](const httplib::Request& req, httplib::Response& res) {
            handle_search(req, res);
        });
        server.Get(R"(/visit/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
            handle_visit(req.matches[1], res);
        });
    }

    static void fail(httplib::Response& res, int status, const std::string& code,
                     const std::string& message, json extra = json::object()) {
        extra["code"] = code;
        extra["message"] = message;
        res.status = status;
        res.set_content(json{{"error", extra}}.dump(), "application/json");
    }

    void handle_search(const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body, nullptr, /*allow_exceptions=*/false);
        if (body.is_discarded() || !body.is_object())
            return fail(res, 400, "bad_request", "body must be a JSON object");
        if (!body.contains("queries") || !body["queries"].is_array())
            return fail(res, 400, "bad_request", "missing array field: queries");
        std::size_t top_k = index.size();
        if (body.contains("top_k")) {
            if (!body["top_k"].is_number_unsigned() || body["top_k"].get<std::uint64_t>() == 0)
                return fail(res, 400, "bad_request", "top_k must be a positive integer");
            top_k = body["top_k"].get<std::size_t>();
        }
        const auto& queries = body["queries"];
        if (queries.size() > cfg.max_batch)
            return fail(res, 413, "over_limit", "too many queries in one request",
                        json{{"limit", cfg.max_batch}});
        if (top_k > cfg.max_top_k)
            return fail(res, 413, "over_limit", "top_k exceeds the per-query ceiling",
                        json{{"limit", cfg.max_top_k}});

        std::vector<std::vector<float>> parsed;
        parsed.reserve(queries.size());
        for (const auto& q : queries) {
            if (!q.is_array() || q.size() != index.dim())
                return fail(res, 400, "bad_request",
                            "each query must be a vector of dimension " +
                                std::to_string(index.dim()));
            std::vector<float> vec;
            vec.reserve(q.size());
            for (const auto& v : q) {
                if (!v.is_number()) return fail(res, 400, "bad_request", "non-numeric component");
                vec.push_back(v.get<float>());
            }
            parsed.push_back(std::move(vec));
        }

        json results = json::array();
        for (const auto& vec : parsed) {
            json hits = json::array();
            for (const auto& hit : index.search(vec, top_k))
                hits.push_back({{"doc_id", hit.doc_id},
                                {"item", hit.item},
                                {"modality", std::string(item_kind_name(hit.modality))},
                                {"score", hit.score},
                                {"content", hit.content}});
            results.push_back(std::move(hits));
        }
        res.set_content(json{{"results", results}}.dump(), "application/json");
    }

    void handle_visit(const std::string& doc_id, httplib::Response& res) {
        if (!index.has_document(doc_id))
            return fail(res, 404, "not_found", "unknown document: " + doc_id);
        const CorpusDocument& doc = index.visit(doc_id);
        json images = json::array();
        for (const auto& img : doc.images)
            images.push_back({{"path", img.path}, {"caption", img.caption}});
        json payload{{"doc_id", doc.doc_id}, {"body", doc.body}, {"images", images}};
        res.set_content(payload.dump(), "application/json");
    }
};

ToolService::ToolService(const CorpusIndex& index, ServiceConfig cfg)
    : impl_(std::make_unique<Impl>(index, std::move(cfg))) {}

ToolService::~ToolService() { stop(); }

void ToolService::start() {
    if (impl_->running.load()) return;
    if (impl_->cfg.port == 0) {
        impl_->bound_port = impl_->server.bind_to_any_port(impl_->cfg.host);
        if (impl_->bound_port < 0) throw CorpusError("could not bind a loopback port");
    } else {
        if (!impl_->server.bind_to_port(impl_->cfg.host, impl_->cfg.port))
            throw CorpusError("could not bind port " + std::to_string(impl_->cfg.port));
        impl_->bound_port = impl_->cfg.port;
    }
    impl_->running.store(true);
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void ToolService::stop() {
    if (!impl_ || !impl_->running.exchange(false)) return;
    impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

bool ToolService::running() const { return impl_->running.load(); }

int ToolService::port() const { return impl_->bound_port; }

} // namespace kgbench
