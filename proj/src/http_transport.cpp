#include <httplib.h>

#include "smarthouse/client.hpp"

namespace smarthouse::client {

struct HttpTransport::Impl {
    explicit Impl(const std::string& server) : http(server.find("://") == std::string::npos ? "http://" + server : server) {
        http.set_connection_timeout(5);
        http.set_read_timeout(10);
    }
    httplib::Client http;
};

HttpTransport::HttpTransport(const std::string& server) : impl_(std::make_unique<Impl>(server)) {
    if (!impl_->http.is_valid()) throw NetworkError("invalid server address " + server);
}

HttpTransport::~HttpTransport() = default;

std::string HttpTransport::get(const std::string& target) {
    auto res = impl_->http.Get(target);
    if (!res) throw NetworkError("GET failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw NetworkError("HTTP status " + std::to_string(res->status));
    return res->body;
}

std::string HttpTransport::sms(const std::string& frame) {
    auto res = impl_->http.Post("/sms", frame, "text/plain");
    if (!res) throw NetworkError("SMS send failed: " + httplib::to_string(res.error()));
    if (res->status != 200) throw NetworkError("HTTP status " + std::to_string(res->status));
    return res->body;
}

}  // namespace smarthouse::client
