#pragma once

// TCP server loop: thread per connection, one response frame per request
// frame. All state lives in the ObjectStore.

#include <atomic>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "zerotree/wire/store.hpp"

namespace zerotree::wire {

class Server {
public:
    // Binds immediately; port 0 picks an ephemeral port. Throws
    // BindFailure when the address is unavailable.
    Server(const std::string& host, std::uint16_t port, const std::string& store_path);
    ~Server();

    std::uint16_t port() const { return port_; }
    ObjectStore& store() { return *store_; }

    void run();    // blocking accept loop; returns after stop()
    void start();  // accept loop on a background thread (tests)
    void stop();

private:
    void serve_connection(int fd);

    std::unique_ptr<ObjectStore> store_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread accept_thread_;
    std::vector<std::thread> sessions_;
    std::vector<int> session_fds_;
    std::mutex sessions_mutex_;
};

}  // namespace zerotree::wire
