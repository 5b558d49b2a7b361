#include "sot/backend.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sot/util.hpp"

namespace sot {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
    json j = v;
    return j.dump();
}

}  // namespace

void BackendConfig::validate() const {
    if (id.empty()) throw std::invalid_argument("backend config: id must be non-empty");
    if (type != "http" && type != "mock-echo-gold" && type != "mock-echo-wrong") {
        throw std::invalid_argument("backend config: unknown type '" + type + "'");
    }
    if (!std::isfinite(temperature) || temperature < 0) {
        throw std::invalid_argument("backend config: temperature must be finite and >= 0");
    }
    if (timeout_s <= 0) throw std::invalid_argument("backend config: timeout must be > 0");
    if (max_retries < 0) throw std::invalid_argument("backend config: max_retries must be >= 0");
    if (max_output_tokens <= 0) {
        throw std::invalid_argument("backend config: max_output_tokens must be > 0");
    }
    if (requests_per_minute < 0) {
        throw std::invalid_argument("backend config: requests_per_minute must be >= 0");
    }
    if (type == "http" && endpoint_url.empty()) {
        throw std::invalid_argument("backend config: endpoint_url required for http backends");
    }
}

BackendConfig BackendConfig::from_json_file(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("backend config " + path.string() + ": " + e.what());
    }
    BackendConfig c;
    c.id = j.value("id", c.id);
    c.type = j.value("type", c.type);
    c.endpoint_url = j.value("endpoint_url", c.endpoint_url);
    c.model = j.value("model", c.model);
    c.temperature = j.value("temperature", c.temperature);
    c.max_output_tokens = j.value("max_output_tokens", c.max_output_tokens);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.requests_per_minute = j.value("requests_per_minute", c.requests_per_minute);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.validate();
    return c;
}

CacheKey CacheKey::compute(const BackendConfig& config, const PromptBundle& prompt) {
    std::string key;
    key += config.id;
    key += '\x1f';
    key += config.model;
    key += '\x1f';
    key += fmt_double(config.temperature);
    key += '\x1f';
    key += std::to_string(config.max_output_tokens);
    key += '\x1f';
    key += prompt.template_version;
    key += '\x1f';
    key += prompt.user_text;
    return {sha256_hex(key)};
}

Completion complete_with_retries(int max_retries, double base_delay_s,
                                 const std::function<Completion()>& attempt, int* attempts_out) {
    for (int attempt_no = 0;; ++attempt_no) {
        try {
            Completion c = attempt();
            if (attempts_out) *attempts_out = attempt_no + 1;
            return c;
        } catch (const BackendError& e) {
            if (!e.transient() || attempt_no >= max_retries) throw;
            double delay = base_delay_s * std::pow(2.0, attempt_no);
            if (delay > 0) {
                std::this_thread::sleep_for(std::chrono::duration<double>(std::min(delay, 8.0)));
            }
        }
    }
}

RateLimiter::RateLimiter(int requests_per_minute)
    : next_(std::chrono::steady_clock::now()),
      interval_(requests_per_minute > 0 ? 60.0 / requests_per_minute : 0.0) {}

void RateLimiter::acquire() {
    if (interval_.count() <= 0) return;
    std::chrono::steady_clock::time_point wake;
    {
        std::lock_guard lock(mu_);
        auto now = std::chrono::steady_clock::now();
        if (next_ < now) next_ = now;
        wake = next_;
        next_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(interval_);
    }
    std::this_thread::sleep_until(wake);
}

RateLimiter& rate_limiter_for(const std::string& backend_id, int requests_per_minute) {
    static std::mutex registry_mu;
    static std::map<std::string, std::unique_ptr<RateLimiter>> registry;
    std::lock_guard lock(registry_mu);
    auto it = registry.find(backend_id);
    if (it == registry.end()) {
        it = registry.emplace(backend_id, std::make_unique<RateLimiter>(requests_per_minute)).first;
    }
    return *it->second;
}

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    config_.validate();
}

namespace {

struct ParsedUrl {
    std::string scheme_host_port;
    std::string base_path;
};

ParsedUrl parse_url(const std::string& url) {
    size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("endpoint_url must include a scheme: " + url);
    }
    size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string path = url.substr(path_start);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {url.substr(0, path_start), path};
}

}  // namespace

Completion HttpBackend::attempt_once(const PromptBundle& prompt) {
    ParsedUrl parsed = parse_url(config_.endpoint_url);

    httplib::Client client(parsed.scheme_host_port);
    auto timeout = std::chrono::duration<double>(config_.timeout_s);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    httplib::Headers headers;
    if (!config_.api_key_env.empty()) {
        if (const char* key = std::getenv(config_.api_key_env.c_str())) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }

    json body{
        {"model", config_.model},
        {"messages", json::array({json{{"role", "user"}, {"content", prompt.user_text}}})},
        {"temperature", config_.temperature},
        {"max_tokens", config_.max_output_tokens},
    };

    std::string path = parsed.base_path;
    if (!path.ends_with("/chat/completions")) path += "/chat/completions";

    auto start = std::chrono::steady_clock::now();
    httplib::Result res = client.Post(path, headers, body.dump(), "application/json");
    auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start);

    if (!res) {
        throw BackendError("backend " + config_.id + ": transport error: " +
                               httplib::to_string(res.error()),
                           /*transient=*/true);
    }
    if (res->status < 200 || res->status >= 300) {
        bool transient = res->status == 408 || res->status == 429 || res->status >= 500;
        throw BackendError("backend " + config_.id + ": HTTP " + std::to_string(res->status) + ": " +
                               res->body.substr(0, 200),
                           transient, res->status);
    }

    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const json::exception& e) {
        throw BackendError("backend " + config_.id + ": invalid JSON reply: " + e.what(),
                           /*transient=*/false);
    }

    Completion out;
    try {
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception&) {
        throw BackendError("backend " + config_.id + ": reply lacks choices[0].message.content",
                           /*transient=*/false);
    }
    out.latency_s = elapsed.count();
    if (reply.contains("usage") && reply["usage"].contains("prompt_tokens") &&
        reply["usage"].contains("completion_tokens")) {
        out.input_tokens = reply["usage"]["prompt_tokens"].get<long>();
        out.output_tokens = reply["usage"]["completion_tokens"].get<long>();
    } else {
        out.input_tokens = static_cast<long>(count_whitespace_tokens(prompt.user_text));
        out.output_tokens = static_cast<long>(count_whitespace_tokens(out.text));
        out.usage_estimated = true;
    }
    return out;
}

Completion HttpBackend::complete(const PromptBundle& prompt) {
    RateLimiter& limiter = rate_limiter_for(config_.id, config_.requests_per_minute);
    return complete_with_retries(config_.max_retries, backoff_base_s_, [&] {
        limiter.acquire();
        return attempt_once(prompt);
    });
}

ScriptedBackend::ScriptedBackend() {
    config_.id = "mock";
    config_.type = "mock-echo-gold";
    config_.model = "scripted";
    config_.endpoint_url = "";
}

ScriptedBackend::ScriptedBackend(BackendConfig config) : config_(std::move(config)) {}

void ScriptedBackend::set_response(const std::string& fingerprint, std::string text) {
    std::lock_guard lock(mu_);
    responses_[fingerprint] = std::move(text);
}

void ScriptedBackend::set_default_rule(std::function<std::string(const PromptBundle&)> rule) {
    std::lock_guard lock(mu_);
    default_rule_ = std::move(rule);
}

void ScriptedBackend::fail_next(int n, bool transient) {
    std::lock_guard lock(mu_);
    fail_remaining_ = n;
    fail_transient_ = transient;
}

int ScriptedBackend::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

Completion ScriptedBackend::complete(const PromptBundle& prompt) {
    std::string text;
    {
        std::lock_guard lock(mu_);
        ++calls_;
        if (fail_remaining_ > 0) {
            --fail_remaining_;
            throw BackendError("scripted backend: injected failure", fail_transient_, 503);
        }
        auto it = responses_.find(prompt.strategy_fingerprint);
        if (it != responses_.end()) {
            text = it->second;
        } else if (default_rule_) {
            text = default_rule_(prompt);
        } else {
            throw BackendError("scripted backend: no response for fingerprint " +
                                   prompt.strategy_fingerprint,
                               /*transient=*/false);
        }
    }
    Completion out;
    out.text = std::move(text);
    out.input_tokens = static_cast<long>(count_whitespace_tokens(prompt.user_text));
    out.output_tokens = static_cast<long>(count_whitespace_tokens(out.text));
    out.latency_s = 0.001;
    return out;
}

ResponseCache::ResponseCache(std::filesystem::path file) : file_(std::move(file)) {
    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    load();
}

void ResponseCache::load() {
    if (!std::filesystem::exists(file_)) return;
    std::string content = read_file(file_);
    needs_newline_ = !content.empty() && content.back() != '\n';
    int line_no = 0;
    for (const auto& line : split_lines(content)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object() || !j.contains("key") || !j["key"].is_string() ||
            !j.contains("text") || !j["text"].is_string() || !j.contains("in") ||
            !j["in"].is_number() || !j.contains("out") || !j["out"].is_number() ||
            !j.contains("latency") || !j["latency"].is_number()) {
            ++corrupt_lines_;
            std::cerr << "warning: cache " << file_.string() << ":" << line_no
                      << ": skipping corrupt line\n";
            continue;
        }
        Completion c;
        c.text = j["text"].get<std::string>();
        c.input_tokens = j["in"].get<long>();
        c.output_tokens = j["out"].get<long>();
        c.latency_s = j["latency"].get<double>();
        c.usage_estimated = j.value("est", false);
        c.from_cache = true;
        index_[j["key"].get<std::string>()] = std::move(c);
    }
}

std::optional<Completion> ResponseCache::lookup(const CacheKey& key) const {
    std::lock_guard lock(mu_);
    auto it = index_.find(key.digest);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

void ResponseCache::store(const CacheKey& key, const Completion& completion) {
    ordered_json j;
    j["key"] = key.digest;
    j["text"] = completion.text;
    j["in"] = completion.input_tokens;
    j["out"] = completion.output_tokens;
    j["latency"] = completion.latency_s;
    if (completion.usage_estimated) j["est"] = true;

    std::lock_guard lock(mu_);
    std::ofstream out(file_, std::ios::binary | std::ios::app);
    if (!out) throw std::runtime_error("cache: cannot append to " + file_.string());
    if (needs_newline_) {
        out << '\n';  // heal a truncated final line before appending
        needs_newline_ = false;
    }
    out << j.dump() << '\n';
    out.flush();
    Completion stored = completion;
    stored.from_cache = true;
    index_[key.digest] = std::move(stored);
}

size_t ResponseCache::entries() const {
    std::lock_guard lock(mu_);
    return index_.size();
}

size_t ResponseCache::corrupt_lines() const {
    std::lock_guard lock(mu_);
    return corrupt_lines_;
}

Completion cached_complete(ResponseCache& cache, Backend& backend, const PromptBundle& prompt) {
    CacheKey key = CacheKey::compute(backend.config(), prompt);
    if (auto hit = cache.lookup(key)) return *hit;
    Completion fresh = backend.complete(prompt);
    cache.store(key, fresh);
    return fresh;
}

}  // namespace sot
