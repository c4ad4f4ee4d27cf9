#include "deception/ws_server.hpp"

#include <atomic>
#include <chrono>
#include <deque>
#include <filesystem>
#include <fstream>

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "deception/live_session.hpp"

namespace deception::server {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, session::SessionConfig config, std::string log_path,
             std::function<void(std::string_view)> log)
      : ws_(std::move(socket)),
        timer_(ws_.get_executor()),
        period_(std::chrono::duration<double>(1.0 / config.trajectory.frame_rate)),
        log_(std::move(log)),
        live_(std::move(config),
              [this](std::string_view msg) { note(msg); }),
        log_path_(std::move(log_path)),
        epoch_(std::chrono::steady_clock::now()) {}

  void start() {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

 private:
  double now() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_).count();
  }

  void note(std::string_view msg) const {
    if (log_) log_(live_.session().config().session_id + ": " + std::string(msg));
  }

  void on_accept(beast::error_code ec) {
    if (ec) return note("handshake failed: " + ec.message());
    send(live_.open());
    do_read();
    schedule_tick();
  }

  void do_read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) return close_session();
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    for (auto& m : live_.handle_text(text, now())) send(m);
    if (live_.finished()) write_log();
    do_read();
  }

  void schedule_tick() {
    timer_.expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(period_));
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) { self->on_tick(ec); });
  }

  void on_tick(beast::error_code ec) {
    if (ec || closed_) return;
    for (auto& m : live_.tick(now())) send(m);
    schedule_tick();
  }

  void send(const nlohmann::json& message) {
    queue_.push_back(message.dump());
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->on_write(ec);
    });
  }

  void on_write(beast::error_code ec) {
    if (ec) return close_session();
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  void close_session() {
    if (closed_) return;
    closed_ = true;
    timer_.cancel();
    write_log();
  }

  void write_log() {
    if (log_written_) return;
    log_written_ = true;
    std::ofstream out(log_path_);
    out << live_.log_text();
    note("log written to " + log_path_);
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  std::chrono::duration<double> period_;
  std::function<void(std::string_view)> log_;
  session::LiveSession live_;
  std::string log_path_;
  std::chrono::steady_clock::time_point epoch_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  bool closed_ = false;
  bool log_written_ = false;
};

}  // namespace

struct WebSocketServer::Impl {
  explicit Impl(ServeOptions opts)
      : options(std::move(opts)), acceptor(ioc, tcp::endpoint(net::ip::make_address(options.address), options.port)) {
    session::validate(options.config);
    std::filesystem::create_directories(options.log_dir);
  }

  void do_accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) {
        if (ec != net::error::operation_aborted && options.log) options.log("accept failed: " + ec.message());
        return;
      }
      const std::size_t n = started++;
      auto cfg = options.config;
      const std::string base = cfg.session_id.empty() ? "session-" + std::to_string(cfg.seed) : cfg.session_id;
      cfg.session_id = base + "-" + std::to_string(n + 1);
      cfg.seed += n;
      const auto path = (std::filesystem::path(options.log_dir) / (cfg.session_id + ".jsonl")).string();
      std::make_shared<Connection>(std::move(socket), std::move(cfg), path, options.log)->start();
      do_accept();
    });
  }

  ServeOptions options;
  net::io_context ioc{1};
  tcp::acceptor acceptor;
  std::atomic<std::size_t> started{0};
};

WebSocketServer::WebSocketServer(ServeOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->do_accept();
}

WebSocketServer::~WebSocketServer() = default;

std::uint16_t WebSocketServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void WebSocketServer::run() { impl_->ioc.run(); }

void WebSocketServer::stop() { impl_->ioc.stop(); }

std::size_t WebSocketServer::sessions_started() const { return impl_->started.load(); }

}  // namespace deception::server
