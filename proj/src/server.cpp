#include "blequiz/server.hpp"

#include <atomic>
#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <fstream>
#include <iostream>
#include <iterator>
#include <mutex>
#include <system_error>
#include <thread>
#include <vector>

#include "blequiz/engine.hpp"
#include "blequiz/outbox.hpp"
#include "blequiz/scan_log.hpp"

namespace blequiz {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

constexpr const char* kServerName = "blequiz";

constexpr const char* kPlaceholderPage = R"html(<!doctype html>
<html><head><meta charset="utf-8"><title>BLE quiz</title></head>
<body style="font-family:sans-serif">
<h1>BLE indoor-positioning quiz</h1>
<p>No UI bundle is installed (set <code>ui_dir</code> in the config). Raw game state:</p>
<pre id="state">connecting...</pre>
<script>
const ws = new WebSocket((location.protocol === "https:" ? "wss://" : "ws://") + location.host + "/ws");
ws.onmessage = (e) => { document.getElementById("state").textContent = JSON.stringify(JSON.parse(e.data), null, 2); };
</script>
</body></html>
)html";

std::string_view mime_type(std::string_view path) {
  const auto dot = path.rfind('.');
  const auto ext = dot == std::string_view::npos ? std::string_view{} : path.substr(dot);
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "application/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".map") return "application/json";
  return "application/octet-stream";
}

void log_line(const std::string& msg) { std::clog << "[blequiz] " << msg << std::endl; }

/// Samples from a live feed, filled by reader threads or connections.
struct LiveFeed {
  std::mutex mu;
  std::deque<RssiSample> samples;
  std::uint64_t rejected_lines = 0;

  void accept_line(std::string_view line, std::size_t line_no) {
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) return;
    try {
      RssiSample s = parse_scan_line(line, line_no);
      std::lock_guard lk(mu);
      samples.push_back(std::move(s));
    } catch (const ParseError& e) {
      std::lock_guard lk(mu);
      ++rejected_lines;
      log_line(std::string("live feed: ") + e.what());
    }
  }
};

}  // namespace

class WsSession;

struct GameServer::Impl {
  Impl(AppConfig cfg, QuestionBank b, ServerOptions opts)
      : config(std::move(cfg)), bank(std::move(b)), options(std::move(opts)), acceptor(ioc) {}

  AppConfig config;
  QuestionBank bank;
  ServerOptions options;
  std::unique_ptr<Engine> engine;
  std::unique_ptr<SessionWriter> recorder;
  std::shared_ptr<LiveFeed> feed = std::make_shared<LiveFeed>();

  net::io_context ioc;
  tcp::acceptor acceptor;
  std::optional<tcp::acceptor> feed_acceptor;
  std::optional<net::signal_set> signals;
  std::thread net_thread;
  std::thread loop_thread;
  bool started = false;
  bool joined = false;

  // Shared between the loop thread and the network thread.
  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;
  std::deque<std::pair<ClientCommand, std::weak_ptr<WsSession>>> commands;

  mutable std::mutex latest_mu;
  std::string latest_text;

  // Network thread only.
  std::vector<std::weak_ptr<WsSession>> clients;
  std::uint64_t latest_seq = 0;
  Frame latest_frame;

  void start();
  void loop();
  void publish(const StateSnapshot& snap);
  void send_error(const std::weak_ptr<WsSession>& client, std::string reason);
  void on_client_message(const std::shared_ptr<WsSession>& client, const std::string& text);
  void register_client(const std::shared_ptr<WsSession>& client);
  http::response<http::string_body> handle_http(const http::request<http::string_body>& req);
  void do_accept();
  void do_accept_feed();
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket&& socket, GameServer::Impl& server)
      : ws_(std::move(socket)), server_(server) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::decorator([](websocket::response_type& res) {
      res.set(http::field::server, kServerName);
    }));
    ws_.async_accept(req, beast::bind_front_handler(&WsSession::on_accept, shared_from_this()));
  }

  void offer_snapshot(std::uint64_t seq, const Frame& frame) {
    outbox_.offer_snapshot(seq, frame);
    maybe_write();
  }

  void send_control(std::string frame) {
    outbox_.push_control(std::move(frame));
    maybe_write();
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    server_.register_client(shared_from_this());
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&WsSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      return;
    }
    std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    server_.on_client_message(shared_from_this(), text);
    do_read();
  }

  void maybe_write() {
    if (writing_ || closed_) return;
    auto next = outbox_.take();
    if (!next) return;
    writing_ = true;
    current_ = std::move(*next);
    ws_.text(true);
    ws_.async_write(net::buffer(*current_),
                    beast::bind_front_handler(&WsSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    writing_ = false;
    current_.reset();
    if (ec) {
      closed_ = true;
      return;
    }
    maybe_write();
  }

  websocket::stream<beast::tcp_stream> ws_;
  GameServer::Impl& server_;
  beast::flat_buffer buffer_;
  ClientOutbox outbox_;
  Frame current_;
  bool writing_ = false;
  bool closed_ = false;
};

namespace {

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, GameServer::Impl& server)
      : stream_(std::move(socket)), server_(server) {}

  void run() { do_read(); }

 private:
  void do_read() {
    req_ = {};
    http::async_read(stream_, buffer_, req_,
                     beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;

    if (websocket::is_upgrade(req_) && req_.target() == "/ws") {
      std::make_shared<WsSession>(stream_.release_socket(), server_)->run(std::move(req_));
      return;
    }
    send(server_.handle_http(req_));
  }

  void send(http::response<http::string_body> res) {
    auto sp = std::make_shared<http::response<http::string_body>>(std::move(res));
    http::async_write(stream_, *sp, [self = shared_from_this(), sp](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (sp->need_eof()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  GameServer::Impl& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

class FeedConnection : public std::enable_shared_from_this<FeedConnection> {
 public:
  FeedConnection(tcp::socket&& socket, std::shared_ptr<LiveFeed> feed)
      : socket_(std::move(socket)), feed_(std::move(feed)) {}

  void run() { do_read(); }

 private:
  void do_read() {
    net::async_read_until(socket_, net::dynamic_buffer(buf_), '\n',
                          [self = shared_from_this()](beast::error_code ec, std::size_t n) {
                            if (ec) {
                              if (!self->buf_.empty()) self->feed_->accept_line(self->buf_, ++self->line_no_);
                              return;
                            }
                            std::string line = self->buf_.substr(0, n - 1);
                            self->buf_.erase(0, n);
                            self->feed_->accept_line(line, ++self->line_no_);
                            self->do_read();
                          });
  }

  tcp::socket socket_;
  std::shared_ptr<LiveFeed> feed_;
  std::string buf_;
  std::size_t line_no_ = 0;
};

[[noreturn]] void throw_net_error(const beast::error_code& ec, const std::string& what) {
  throw std::system_error(std::error_code(ec.value(), std::system_category()), what);
}

tcp::endpoint resolve_endpoint(net::io_context& ioc, const ListenAddress& addr) {
  tcp::resolver resolver(ioc);
  beast::error_code ec;
  auto results = resolver.resolve(addr.host, std::to_string(addr.port), ec);
  if (ec || results.empty()) throw_net_error(ec, "resolve " + format_listen_address(addr));
  return results.begin()->endpoint();
}

void open_acceptor(tcp::acceptor& acceptor, const tcp::endpoint& ep) {
  beast::error_code ec;
  const std::string where = ep.address().to_string() + ":" + std::to_string(ep.port());
  acceptor.open(ep.protocol(), ec);
  if (ec) throw_net_error(ec, "open " + where);
  acceptor.set_option(net::socket_base::reuse_address(true), ec);
  acceptor.bind(ep, ec);
  if (ec) throw_net_error(ec, "bind " + where);
  acceptor.listen(net::socket_base::max_listen_connections, ec);
  if (ec) throw_net_error(ec, "listen " + where);
}

}  // namespace

void GameServer::Impl::register_client(const std::shared_ptr<WsSession>& client) {
  std::erase_if(clients, [](const auto& w) { return w.expired(); });
  clients.push_back(client);
  if (latest_frame) client->offer_snapshot(latest_seq, latest_frame);
}

void GameServer::Impl::on_client_message(const std::shared_ptr<WsSession>& client,
                                         const std::string& text) {
  auto parsed = parse_client_message(text);
  if (auto* reason = std::get_if<std::string>(&parsed)) {
    client->send_control(error_frame(*reason));
    return;
  }
  const auto& cmd = std::get<ClientCommand>(parsed);
  if (config.mode == Mode::Replay) {
    client->send_control(error_frame(cmd.kind == EventKind::Move
                                         ? "move is only accepted in sim mode (current mode: replay)"
                                         : "replay mode is read-only"));
    return;
  }
  if (cmd.kind == EventKind::Move && config.mode != Mode::Sim) {
    client->send_control(error_frame("move is only accepted in sim mode (current mode: " +
                                     std::string(mode_name(config.mode)) + ")"));
    return;
  }
  std::lock_guard lk(mu);
  commands.emplace_back(cmd, client);
}

void GameServer::Impl::send_error(const std::weak_ptr<WsSession>& client, std::string reason) {
  net::post(ioc, [client, reason = std::move(reason)] {
    if (auto c = client.lock()) c->send_control(error_frame(reason));
  });
}

void GameServer::Impl::publish(const StateSnapshot& snap) {
  auto frame = std::make_shared<const std::string>(to_json(snap));
  {
    std::lock_guard lk(latest_mu);
    latest_text = *frame;
  }
  net::post(ioc, [this, seq = snap.seq, frame] {
    latest_seq = seq;
    latest_frame = frame;
    std::erase_if(clients, [](const auto& w) { return w.expired(); });
    for (const auto& w : clients) {
      if (auto c = w.lock()) c->offer_snapshot(seq, frame);
    }
  });
}

http::response<http::string_body> GameServer::Impl::handle_http(
    const http::request<http::string_body>& req) {
  auto make = [&](http::status status, std::string_view type, std::string body) {
    http::response<http::string_body> res{status, req.version()};
    res.set(http::field::server, kServerName);
    res.set(http::field::content_type, std::string(type));
    res.keep_alive(req.keep_alive());
    res.body() = std::move(body);
    res.prepare_payload();
    return res;
  };

  if (req.method() != http::verb::get && req.method() != http::verb::head) {
    return make(http::status::method_not_allowed, "text/plain", "method not allowed\n");
  }
  std::string target(req.target());
  if (auto q = target.find('?'); q != std::string::npos) target.resize(q);

  if (target == "/healthz") return make(http::status::ok, "application/json", R"({"status":"ok"})");
  if (target == "/config") return make(http::status::ok, "application/json", sanitized_config(config));

  if (target.empty() || target[0] != '/' || target.find("..") != std::string::npos) {
    return make(http::status::bad_request, "text/plain", "bad path\n");
  }
  std::string rel = target == "/" ? "index.html" : target.substr(1);
  if (!config.ui_dir.empty()) {
    std::ifstream in(std::filesystem::path(config.ui_dir) / rel, std::ios::binary);
    if (in) {
      std::string body{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
      return make(http::status::ok, mime_type(rel), std::move(body));
    }
  }
  if (target == "/") return make(http::status::ok, "text/html; charset=utf-8", kPlaceholderPage);
  return make(http::status::not_found, "text/plain", "not found\n");
}

void GameServer::Impl::do_accept() {
  acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    do_accept();
  });
}

void GameServer::Impl::do_accept_feed() {
  feed_acceptor->async_accept([this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;
    std::make_shared<FeedConnection>(std::move(socket), feed)->run();
    do_accept_feed();
  });
}

void GameServer::Impl::start() {
  engine = std::make_unique<Engine>(config, bank);
  if (options.record && config.mode != Mode::Replay) {
    recorder = std::make_unique<SessionWriter>(
        *options.record, SessionHeader{config.seed, config.tick_rate_hz, std::string(mode_name(config.mode))});
    engine->set_recorder(recorder.get());
  }
  if (config.mode == Mode::Replay && !options.replay) {
    throw std::invalid_argument("replay mode needs a recorded session");
  }

  open_acceptor(acceptor, resolve_endpoint(ioc, config.listen));

  if (config.mode == Mode::Live) {
    if (config.live_source == "stdin") {
      std::istream* in = options.live_input ? options.live_input : &std::cin;
      // Detached: a blocking getline cannot be interrupted. It only touches
      // the shared feed.
      std::thread([in, feed = feed] {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(*in, line)) feed->accept_line(line, ++line_no);
      }).detach();
    } else {
      feed_acceptor.emplace(ioc);
      const auto addr = parse_listen_address(std::string_view(config.live_source).substr(6));
      open_acceptor(*feed_acceptor, resolve_endpoint(ioc, addr));
      log_line("live feed on tcp://" + addr.host + ":" +
               std::to_string(feed_acceptor->local_endpoint().port()));
      do_accept_feed();
    }
  }

  if (options.handle_signals) {
    signals.emplace(ioc, SIGINT, SIGTERM);
    signals->async_wait([this](beast::error_code ec, int) {
      if (ec) return;
      log_line("shutting down");
      std::lock_guard lk(mu);
      stopping = true;
      cv.notify_all();
    });
  }

  publish(engine->latest());
  do_accept();
  log_line("listening on http://" + config.listen.host + ":" +
           std::to_string(acceptor.local_endpoint().port()) + " (mode " +
           std::string(mode_name(config.mode)) + ")");

  net_thread = std::thread([this] {
    auto guard = net::make_work_guard(ioc);
    ioc.run();
  });
  loop_thread = std::thread([this] { loop(); });
  started = true;
}

void GameServer::Impl::loop() {
  const TimestampMs period_ms = config.tick_period_ms();
  const auto period = std::chrono::milliseconds(period_ms);
  const auto t0 = std::chrono::steady_clock::now();
  std::optional<SessionReplayer> replayer;
  if (options.replay) replayer.emplace(*options.replay, *engine);

  for (TimestampMs k = 1;; ++k) {
    std::deque<std::pair<ClientCommand, std::weak_ptr<WsSession>>> pending;
    {
      std::unique_lock lk(mu);
      if (options.realtime) {
        cv.wait_until(lk, t0 + k * period, [&] { return stopping; });
      }
      if (stopping) break;
      pending.swap(commands);
    }
    std::deque<RssiSample> samples;
    {
      std::lock_guard lk(feed->mu);
      samples.swap(feed->samples);
    }

    const TimestampMs now = k * period_ms;
    try {
      for (const auto& [cmd, client] : pending) {
        if (auto err = engine->handle(cmd, now)) send_error(client, *err);
      }
      for (const auto& s : samples) engine->ingest(s);

      if (replayer) {
        if (replayer->done()) continue;  // keep serving the final state
        publish(replayer->step());
      } else {
        publish(engine->tick(now));
      }
      if (recorder) recorder->flush();
    } catch (const std::exception& e) {
      log_line(std::string("loop error: ") + e.what());
      std::lock_guard lk(mu);
      stopping = true;
      cv.notify_all();
      break;
    }
  }
}

GameServer::GameServer(AppConfig config, QuestionBank bank, ServerOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(bank), std::move(options))) {}

GameServer::~GameServer() {
  request_stop();
  wait();
}

void GameServer::start() { impl_->start(); }

unsigned short GameServer::port() const { return impl_->acceptor.local_endpoint().port(); }

void GameServer::request_stop() {
  std::lock_guard lk(impl_->mu);
  impl_->stopping = true;
  impl_->cv.notify_all();
}

void GameServer::wait() {
  if (!impl_->started || impl_->joined) return;
  {
    std::unique_lock lk(impl_->mu);
    impl_->cv.wait(lk, [&] { return impl_->stopping; });
  }
  impl_->loop_thread.join();
  net::post(impl_->ioc, [this] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    if (impl_->feed_acceptor) impl_->feed_acceptor->close(ec);
    if (impl_->signals) impl_->signals->cancel(ec);
  });
  impl_->ioc.stop();
  impl_->net_thread.join();
  if (impl_->recorder) impl_->recorder->flush();
  impl_->joined = true;
}

std::string GameServer::latest_snapshot() const {
  std::lock_guard lk(impl_->latest_mu);
  return impl_->latest_text;
}

}  // namespace blequiz
