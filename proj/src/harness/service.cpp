#include "msabn/harness/service.hpp"

#include <httplib.h>

#include <fstream>
#include <sstream>

#include "msabn/core/errors.hpp"

namespace msabn::harness {
namespace {

void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

nlohmann::json error_body(const std::string& field, const std::string& message) {
  return {{"errors", nlohmann::json::array({{{"field", field}, {"message", message}}})}};
}

int query_int(const httplib::Request& req, const std::string& key, int fallback) {
  if (!req.has_param(key)) return fallback;
  try {
    return std::stoi(req.get_param_value(key));
  } catch (const std::exception&) {
    throw ConfigError("query parameter " + key + " must be an integer");
  }
}

}  // namespace

AnnotationService::AnnotationService(OverlayManifest manifest, std::filesystem::path manifest_dir,
                                     AnnotationStore& store)
    : manifest_(std::move(manifest)), manifest_dir_(std::move(manifest_dir)), store_(store),
      server_(std::make_unique<httplib::Server>()) {
  routes();
}

AnnotationService::~AnnotationService() { stop(); }

void AnnotationService::routes() {
  server_->Get("/samples", [this](const httplib::Request& req, httplib::Response& res) {
    SortOrder order;
    int page = 0, page_size = 50;
    try {
      order = parse_sort_order(req.has_param("sort") ? req.get_param_value("sort") : "");
      page = query_int(req, "page", 0);
      page_size = query_int(req, "page_size", 50);
    } catch (const ConfigError& e) {
      send_json(res, 400, error_body("query", e.what()));
      return;
    }
    if (page < 0 || page_size < 1) {
      send_json(res, 400, error_body("query", "page must be >= 0 and page_size >= 1"));
      return;
    }
    const auto latest = store_.latest();
    const auto ordered = sorted_entries(manifest_, order);
    nlohmann::json samples = nlohmann::json::array();
    const std::size_t first = static_cast<std::size_t>(page) * page_size;
    for (std::size_t i = first; i < ordered.size() && i < first + page_size; ++i) {
      const OverlayEntry& e = *ordered[i];
      nlohmann::json item = e;
      item["id"] = e.sample_id;
      item["overlay_url"] = "/samples/" + e.sample_id + "/overlay";
      if (auto it = latest.find(e.sample_id); it != latest.end()) {
        item["bbox"] = it->second.bbox;
        item["annotated"] = true;
      } else {
        item["annotated"] = false;
      }
      samples.push_back(std::move(item));
    }
    send_json(res, 200,
              {{"total", manifest_.entries.size()},
               {"page", page},
               {"page_size", page_size},
               {"sort", order == SortOrder::wrong_first ? "wrong_first" : "frac_out_desc"},
               {"samples", samples}});
  });

  server_->Get(R"(/samples/([^/]+)/overlay)", [this](const httplib::Request& req, httplib::Response& res) {
    const OverlayEntry* e = manifest_.find(req.matches[1]);
    if (!e) {
      send_json(res, 404, error_body("id", "unknown sample"));
      return;
    }
    std::ifstream in(manifest_dir_ / e->overlay_path, std::ios::binary);
    if (!in) {
      send_json(res, 404, error_body("overlay", "overlay file missing"));
      return;
    }
    std::ostringstream bytes;
    bytes << in.rdbuf();
    res.set_content(bytes.str(), "image/png");
  });

  server_->Post(R"(/samples/([^/]+)/bbox)", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const OverlayEntry* e = manifest_.find(id);
    if (!e) {
      send_json(res, 404, error_body("id", "unknown sample " + id));
      return;
    }
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::exception&) {
      send_json(res, 400, error_body("body", "request body is not JSON"));
      return;
    }
    const nlohmann::json& box_json = body.contains("bbox") ? body["bbox"] : body;
    AnnotationRecord record;
    record.sample_id = id;
    for (const char* field : {"x_min", "y_min", "x_max", "y_max"}) {
      if (!box_json.contains(field) || !box_json[field].is_number_integer()) {
        send_json(res, 422, error_body(field, "required integer"));
        return;
      }
    }
    record.bbox = box_json.get<BBox>();
    if (auto why = bbox_violation(record.bbox, e->width, e->height)) {
      const auto colon = why->find(':');
      send_json(res, 422, error_body(why->substr(0, colon), why->substr(colon + 2)));
      return;
    }
    record.author = body.value("author", std::string("anonymous"));
    record.timestamp = utc_now_seconds();
    store_.append(record);
    send_json(res, 201, record);
  });

  server_->Get("/annotations", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(store_.raw(), "application/x-ndjson");
  });
}

int AnnotationService::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IngestionError("cannot bind annotation service on " + host);
    return bound;
  }
  if (!server_->bind_to_port(host, port)) throw IngestionError("cannot bind annotation service to port " + std::to_string(port));
  return port;
}

void AnnotationService::listen() { server_->listen_after_bind(); }

int AnnotationService::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  thread_ = std::thread([this] { listen(); });
  server_->wait_until_ready();
  return bound;
}

void AnnotationService::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace msabn::harness
