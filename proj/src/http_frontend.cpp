#include <httplib.h>
#include <spdlog/spdlog.h>

#include "smarthouse/home_server.hpp"
#include "smarthouse/wire.hpp"

namespace smarthouse {

HttpFrontend::HttpFrontend(HomeServer& server) : server_(server), http_(std::make_unique<httplib::Server>()) {
    http_->Get(R"(/m/.*)", [this](const httplib::Request& req, httplib::Response& res) {
        res.set_content(server_.handle_target(req.target), "text/plain");
    });
    http_->Post("/sms", [this](const httplib::Request& req, httplib::Response& res) {
        std::string frame = req.body;
        while (!frame.empty() && (frame.back() == '\n' || frame.back() == '\r')) frame.pop_back();
        res.set_content(server_.handle_sms(frame), "text/plain");
    });
    // Gateway errors travel in the body; only missing UI assets stay 404.
    http_->set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (req.path.rfind("/ui/", 0) == 0 || !res.body.empty()) return;
        res.status = 200;
        res.set_content("ERR PATH\n", "text/plain");
    });
}

HttpFrontend::~HttpFrontend() { stop(); }

void HttpFrontend::mount_ui(const std::filesystem::path& dir) {
    if (!http_->set_mount_point("/ui", dir.string())) throw std::runtime_error("cannot mount " + dir.string());
}

int HttpFrontend::start(const std::string& host, int port) {
    int bound = port;
    if (port == 0) {
        bound = http_->bind_to_any_port(host);
    } else if (!http_->bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    thread_ = std::thread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
    spdlog::info("gateway listening on {}:{}", host, bound);
    return bound;
}

void HttpFrontend::stop() {
    if (http_) http_->stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace smarthouse
