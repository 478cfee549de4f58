#include "gce/gce.h"

#include "gce/api.hpp"
#include "gce/error.hpp"
#include "gce/model.hpp"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

struct gce_system {
    std::shared_ptr<const gce::Model> model;
};

struct gce_service {
    gce::api::Service service;
};

namespace {

thread_local std::string last_error;

gce_status status_of(gce::Errc c) {
    switch (c) {
        case gce::Errc::invalid_argument: return GCE_INVALID_ARGUMENT;
        case gce::Errc::validation: return GCE_VALIDATION;
        case gce::Errc::mismatch: return GCE_MISMATCH;
        case gce::Errc::cap_exceeded: return GCE_CAP_EXCEEDED;
        case gce::Errc::incomplete: return GCE_INCOMPLETE;
        case gce::Errc::budget_exhausted: return GCE_BUDGET_EXHAUSTED;
        case gce::Errc::not_found: return GCE_NOT_FOUND;
        case gce::Errc::illegal_move: return GCE_ILLEGAL_MOVE;
        case gce::Errc::out_of_turn: return GCE_OUT_OF_TURN;
        case gce::Errc::unsupported: return GCE_UNSUPPORTED;
        case gce::Errc::internal: return GCE_INTERNAL;
    }
    return GCE_INTERNAL;
}

char* copy(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <class F>
gce_status guarded(F&& body) {
    try {
        body();
        last_error.clear();
        return GCE_OK;
    } catch (const gce::Error& e) {
        last_error = e.what();
        return status_of(e.code());
    } catch (const nlohmann::json::exception& e) {
        last_error = std::string("malformed request: ") + e.what();
        return GCE_INVALID_ARGUMENT;
    } catch (const std::exception& e) {
        last_error = e.what();
        return GCE_INTERNAL;
    }
}

gce::api::json request_of(const char* text) {
    if (!text || !*text) return gce::api::json::object();
    return gce::api::json::parse(text);
}

void require_args(bool ok) { gce::require(ok, gce::Errc::invalid_argument, "null argument"); }

}  // namespace

extern "C" {

const char* gce_version(void) { return "1.0.0"; }

const char* gce_status_name(gce_status status) {
    switch (status) {
        case GCE_OK: return "ok";
        case GCE_INVALID_ARGUMENT: return "invalidArgument";
        case GCE_VALIDATION: return "validation";
        case GCE_MISMATCH: return "mismatch";
        case GCE_CAP_EXCEEDED: return "capExceeded";
        case GCE_INCOMPLETE: return "incomplete";
        case GCE_BUDGET_EXHAUSTED: return "budgetExhausted";
        case GCE_NOT_FOUND: return "notFound";
        case GCE_ILLEGAL_MOVE: return "illegalMove";
        case GCE_OUT_OF_TURN: return "outOfTurn";
        case GCE_UNSUPPORTED: return "unsupported";
        case GCE_INTERNAL: return "internal";
    }
    return "unknown";
}

const char* gce_last_error(void) { return last_error.c_str(); }

void gce_free(char* text) { std::free(text); }

gce_status gce_system_load(const char* document, gce_system** out) {
    return guarded([&] {
        require_args(document && out);
        *out = nullptr;
        auto model = std::make_shared<const gce::Model>(gce::parse_model(document));
        *out = new gce_system{std::move(model)};
    });
}

void gce_system_free(gce_system* system) { delete system; }

gce_status gce_system_print(const gce_system* system, char** out) {
    return guarded([&] {
        require_args(system && out);
        *out = copy(gce::print_model(*system->model));
    });
}

gce_status gce_solve(const gce_system* system, const char* request, char** result) {
    return guarded([&] {
        require_args(system && result);
        *result = copy(gce::api::solve(system->model, request_of(request)).dump(2));
    });
}

gce_status gce_value(const gce_system* system, const char* request, char** result) {
    return guarded([&] {
        require_args(system && result);
        *result = copy(gce::api::values(system->model, request_of(request)).dump(2));
    });
}

gce_status gce_check(const gce_system* system, const char* request, char** result) {
    return guarded([&] {
        require_args(system && result);
        *result = copy(gce::api::check(system->model, request_of(request)).dump(2));
    });
}

gce_status gce_prove(const char* request, char** result) {
    return guarded([&] {
        require_args(result);
        *result = copy(gce::api::prove(request_of(request)).dump(2));
    });
}

gce_status gce_examples(char** result) {
    return guarded([&] {
        require_args(result);
        *result = copy(gce::api::examples().dump(2));
    });
}

gce_status gce_service_new(gce_service** out) {
    return guarded([&] {
        require_args(out);
        *out = new gce_service{};
    });
}

void gce_service_free(gce_service* service) { delete service; }

gce_status gce_service_handle(gce_service* service, const char* method, const char* path, const char* body,
                              int* http_status, char** response) {
    return guarded([&] {
        require_args(service && method && path && http_status && response);
        const auto r = service->service.handle(method, path, body ? body : "");
        *http_status = r.status;
        *response = copy(r.body.dump(2));
    });
}

}  // extern "C"
