#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "normcase/engine/serialize.hpp"
#include "normcase/policy/bundle.hpp"
#include "normcase/service/case_service.hpp"
#include "normcase/service/http_api.hpp"

namespace normcase::testing {

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() / ("normcase-" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Settable clock; each read advances one second so events get distinct stamps.
class ManualClock {
public:
    explicit ManualClock(DateTime start) : t_(start) {}

    DateTime operator()() {
        std::lock_guard g(m_);
        auto now = t_;
        t_ = t_.plus_seconds(1);
        return now;
    }
    void set(DateTime t) {
        std::lock_guard g(m_);
        t_ = t;
    }
    void advance_days(long days) {
        std::lock_guard g(m_);
        t_ = t_.plus_seconds(days * 86400);
    }
    Date today() {
        std::lock_guard g(m_);
        return t_.date();
    }

private:
    std::mutex m_;
    DateTime t_;
};

inline const policy::PolicyBundle& bundled() {
    static const policy::PolicyBundle b = policy::load_bundled_policy();
    return b;
}

inline Date test_day() { return *Date::parse("2024-03-01"); }

/// A service over a temporary store with a manual clock.
struct ServiceFixture {
    explicit ServiceFixture(int snapshot_every = 100)
        : clock(std::make_shared<ManualClock>(DateTime::start_of(test_day()).plus_seconds(9 * 3600))) {
        config.data_dir = dir.path();
        config.snapshot_every = snapshot_every;
        start();
    }

    void start() {
        auto c = clock;
        service = std::make_unique<service::CaseService>(config, bundled(), [c] { return (*c)(); });
    }
    void restart() {
        service.reset();
        start();
    }

    service::User user(const std::string& name = "officer") {
        std::string token;
        try {
            token = service->register_user(name, "geheim-" + name);
        } catch (const service::ServiceError&) {
            token = service->login(name, "geheim-" + name);
        }
        return service->authenticate(token);
    }

    TempDir dir;
    service::ServiceConfig config;
    std::shared_ptr<ManualClock> clock;
    std::unique_ptr<service::CaseService> service;
};

inline nlohmann::json fixture_answers(const std::string& name) {
    const auto* f = bundled().find_fixture(name);
    if (!f) throw std::runtime_error("missing fixture " + name);
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : f->answers) j[k] = v ? engine::scalar_to_json(*v) : nlohmann::json();
    return j;
}

/// In-process HTTP server on an ephemeral port.
class HttpServer {
public:
    explicit HttpServer(service::CaseService& svc) {
        service::mount_api(server_, svc);
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~HttpServer() {
        server_.stop();
        thread_.join();
    }
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    int port() const { return port_; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

struct HttpResult {
    int status = 0;
    nlohmann::json body;
    std::string raw;
};

class ApiClient {
public:
    explicit ApiClient(int port) : client_("127.0.0.1", port) {}

    void set_token(std::string token) { token_ = std::move(token); }

    HttpResult get(const std::string& path) { return wrap(client_.Get(path, headers())); }
    HttpResult post(const std::string& path, const nlohmann::json& body = nlohmann::json::object()) {
        return wrap(client_.Post(path, headers(), body.dump(), "application/json"));
    }
    HttpResult patch(const std::string& path, const nlohmann::json& body) {
        return wrap(client_.Patch(path, headers(), body.dump(), "application/json"));
    }

private:
    httplib::Headers headers() const {
        httplib::Headers h;
        if (!token_.empty()) h.emplace("Authorization", "Bearer " + token_);
        return h;
    }
    static HttpResult wrap(const httplib::Result& r) {
        if (!r) throw std::runtime_error("HTTP request failed");
        HttpResult out{r->status, nlohmann::json(), r->body};
        if (!r->body.empty()) out.body = nlohmann::json::parse(r->body);
        return out;
    }

    httplib::Client client_;
    std::string token_;
};

}  // namespace normcase::testing
