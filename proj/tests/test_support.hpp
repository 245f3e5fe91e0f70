#pragma once

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <string>
#include <thread>
#include <utility>

namespace docsync_test {

// Minimal in-process chat-completions server for client tests.
class TestServer {
public:
    explicit TestServer(httplib::Server::Handler handler) {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~TestServer() {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

inline std::string chat_body(const std::string& text, const std::string& finish = "stop") {
    nlohmann::json payload{
        {"choices", nlohmann::json::array(
                        {nlohmann::json{{"message", nlohmann::json{{"content", text}}},
                                        {"finish_reason", finish}}})},
        {"usage", nlohmann::json{{"prompt_tokens", 12}, {"completion_tokens", 5}}}};
    return payload.dump();
}

} // namespace docsync_test
