#pragma once

namespace httplib {
class Server;
}

namespace normcase::service {

class CaseService;

/// Registers every `/api` route of the case and simulation services.
void mount_api(httplib::Server& server, CaseService& service);

}  // namespace normcase::service
