#pragma once
#ifndef CLICKMINE_DEFAULTS_HPP
#define CLICKMINE_DEFAULTS_HPP

// Built-in copies of the files under data/. tests/test_defaults.cpp keeps
// them byte-identical to the shipped files.

#include <string_view>

namespace clickmine::defaults {

inline constexpr std::string_view rules = R"cmx(# Default action-label rules for the ontology portal's web UI.
#
# Format:  VERB|*  REGEX  =>  LABEL  [@GROUP]
# The first matching rule wins, so specific patterns precede general ones.
# REGEX is matched against the percent-decoded path (no query string).
# @GROUP names the capture group holding the ontology acronym; it is only
# recorded for ontology-page labels.

# Edit content
GET   ^/ontologies/([^/]+)/submissions/new/?$            => Create Ontology Submission
POST  ^/ontologies/([^/]+)/submissions/?$                => Create Ontology Submission
GET   ^/ontologies/success/([^/]+)/?$                    => Create Ontology Submission
*     ^/ontologies/new/?$                                => Create Ontology Submission
*     ^/ontologies/([^/]+)/submissions(/[^/]+)*/?$       => Browse Ontology Submission
*     ^/validate_ontology_file(/.*)?$                    => Validate Ontology File
*     ^/virtual_appliance(/.*)?$                         => Virtual Appliance Download

# Ontology pages
*     ^/ontologies/([^/]+)/classes/[^/]+/notes/?$        => Browse Class Notes @1
*     ^/ontologies/([^/]+)/classes/[^/]+/tree/?$         => Browse Ontology Class Tree @1
*     ^/ontologies/([^/]+)/classes/[^/]+/?$              => Browse Ontology Class @1
*     ^/ontologies/([^/]+)/classes/?$                    => Browse Ontology Classes @1
*     ^/ontologies/([^/]+)/properties/tree/?$            => Browse Ontology Property Tree @1
*     ^/ontologies/([^/]+)/properties(/.*)?$             => Browse Ontology Properties @1
*     ^/ontologies/([^/]+)/mappings(/.*)?$               => Browse Ontology Mappings @1
*     ^/ontologies/([^/]+)/analytics/?$                  => Ontology Analytics @1
*     ^/ontologies/([^/]+)/widgets/[^/]+/?$              => Browse Widgets @1
*     ^/ontologies/([^/]+)/widgets/?$                    => Browse Ontology Widgets @1
*     ^/ontologies/([^/]+)/visualize(/.*)?$              => Browse Ontology Visualization @1
*     ^/ontologies/([^/]+)/notes(/.*)?$                  => Browse Ontology Notes @1
*     ^/ontologies/([^/]+)/?$                            => Ontology Summary @1

# Main areas
GET   ^/$                                                => Browse Main Page
*     ^/ontologies/?$                                    => Browse Ontologies
*     ^/search(/.*)?$                                    => Browse Search
*     ^/help(/.*)?$                                      => Browse Help
*     ^/mappings(/.*)?$                                  => Browse Mappings
*     ^/recommender(/.*)?$                               => Browse Recommender
*     ^/annotator(/.*)?$                                 => Browse Annotator
*     ^/resource_index(/.*)?$                            => Browse Resource Index
*     ^/projects(/.*)?$                                  => Browse Projects
*     ^/notes(/.*)?$                                     => Browse Notes

# User account
*     ^/login/?$                                         => Login
*     ^/logout/?$                                        => Log-Out
*     ^/accounts/new/?$                                  => Sign-Up
POST  ^/accounts/?$                                      => Sign-Up
*     ^/lost_pass(/.*)?$                                 => Lost Password
*     ^/accounts(/.*)?$                                  => Browse Account
*     ^/feedback(/.*)?$                                  => Feedback
)cmx";

inline constexpr std::string_view useragent_blacklist = R"cmx(# Case-insensitive user-agent substrings identifying automated clients.
bot
crawl
spider
slurp
archiver
curl/
wget/
python-requests
python-urllib
java/
libwww
httpclient
go-http-client
scrapy
phantomjs
headlesschrome
facebookexternalhit
)cmx";

inline constexpr std::string_view ip_blacklist = R"cmx(# IP addresses or CIDR blocks to drop, one per line.
# 66.249.64.0/19
)cmx";

inline constexpr std::string_view asset_patterns = R"cmx(# Paths of static assets and background (AJAX) calls; regex search over the
# decoded path.
\.(css|js|map|png|jpe?g|gif|ico|svg|woff2?|ttf|eot)$
^/assets/
^/javascripts/
^/stylesheets/
^/images/
^/ajax/
^/robots\.txt$
)cmx";

inline constexpr std::string_view archetypes = R"cmx({
  "archetypes": [
    {
      "name": "Main Page Visitors",
      "session_length": {"mean": 5, "min": 3},
      "sessions_per_user": {"mean": 3, "min": 2},
      "resource_affinity": {"GO": 1, "NCIT": 1, "SNOMEDCT": 1},
      "start": {"Browse Main Page": 0.8, "Browse Help": 0.1, "Login": 0.1},
      "transitions": {
        "Browse Main Page": {"Browse Main Page": 0.55, "Browse Ontologies": 0.1, "Browse Help": 0.1, "Login": 0.1, "Browse Projects": 0.1, "Feedback": 0.05},
        "Login": {"Browse Main Page": 0.8, "Login": 0.2},
        "Browse Ontologies": {"Browse Main Page": 0.7, "Ontology Summary": 0.3},
        "Ontology Summary": {"Browse Main Page": 1}
      }
    },
    {
      "name": "Ontology Overview Visitors",
      "session_length": {"mean": 6, "min": 3},
      "sessions_per_user": {"mean": 3, "min": 2},
      "resource_affinity": {"GO": 3, "NCIT": 2, "SNOMEDCT": 2, "MESH": 2, "DOID": 1, "HP": 1},
      "start": {"Browse Ontologies": 0.5, "Ontology Summary": 0.5},
      "transitions": {
        "Browse Ontologies": {"Ontology Summary": 0.7, "Browse Ontologies": 0.3},
        "Ontology Summary": {"Browse Ontologies": 0.35, "Ontology Summary": 0.35, "Ontology Analytics": 0.1, "Browse Ontology Mappings": 0.1, "Browse Ontology Submission": 0.1},
        "Ontology Analytics": {"Ontology Summary": 1},
        "Browse Ontology Mappings": {"Ontology Summary": 1},
        "Browse Ontology Submission": {"Ontology Summary": 0.5, "Browse Ontologies": 0.5}
      }
    },
    {"name": "Class Explorers", "iid_from": "Ontology Tree Explorers"},
    {
      "name": "Ontology Tree Explorers",
      "session_length": {"mean": 32, "min": 20},
      "sessions_per_user": {"mean": 1, "min": 1},
      "resource_affinity": {"GO": 3, "NCIT": 2, "CHEBI": 2, "HP": 1, "DOID": 1},
      "start": {"Browse Main Page": 1},
      "transitions": {
        "Browse Main Page": {"Browse Search": 1},
        "Browse Search": {"Ontology Summary": 1},
        "Ontology Summary": {"Browse Ontology Classes": 1},
        "Browse Ontology Classes": {"Browse Ontology Class": 1},
        "Browse Ontology Class": {"Browse Ontology Mappings": 1},
        "Browse Ontology Mappings": {"Browse Ontology Class Tree": 1},
        "Browse Ontology Class Tree": {"Browse Ontology Class Tree": 1}
      }
    },
    {
      "name": "Search Explorers",
      "session_length": {"mean": 8, "min": 3},
      "sessions_per_user": {"mean": 3, "min": 2},
      "resource_affinity": {"NCIT": 2, "SNOMEDCT": 2, "MESH": 2, "RXNORM": 1, "LOINC": 1},
      "start": {"Browse Search": 0.8, "Browse Main Page": 0.2},
      "transitions": {
        "Browse Main Page": {"Browse Search": 1},
        "Browse Search": {"Browse Search": 0.5, "Browse Ontology Class": 0.5},
        "Browse Ontology Class": {"Browse Search": 0.7, "Browse Ontology Class": 0.3}
      }
    },
    {
      "name": "Specific Class Browsers",
      "session_length": {"mean": 3, "min": 2},
      "sessions_per_user": {"mean": 6, "min": 3},
      "resource_affinity": {"GO": 2, "NCIT": 2, "SNOMEDCT": 1, "ICD10": 1, "RXNORM": 1},
      "start": {"Browse Ontology Class": 1},
      "transitions": {
        "Browse Ontology Class": {"Browse Ontology Class": 0.8, "Browse Class Notes": 0.1, "Ontology Summary": 0.1},
        "Browse Class Notes": {"Browse Ontology Class": 1},
        "Ontology Summary": {"Browse Ontology Class": 1}
      }
    },
    {
      "name": "BioPortal Experts",
      "session_length": {"mean": 8, "min": 3},
      "sessions_per_user": {"mean": 3, "min": 2},
      "resource_affinity": {"GO": 1, "NCIT": 1, "SNOMEDCT": 1, "MESH": 1},
      "start": {"Browse Annotator": 0.3, "Browse Recommender": 0.3, "Browse Mappings": 0.2, "Browse Resource Index": 0.2},
      "transitions": {
        "Browse Annotator": {"Browse Annotator": 0.6, "Browse Recommender": 0.2, "Browse Resource Index": 0.1, "Browse Mappings": 0.1},
        "Browse Recommender": {"Browse Recommender": 0.6, "Browse Annotator": 0.2, "Browse Mappings": 0.1, "Browse Resource Index": 0.1},
        "Browse Mappings": {"Browse Mappings": 0.6, "Browse Annotator": 0.2, "Browse Recommender": 0.2},
        "Browse Resource Index": {"Browse Resource Index": 0.5, "Browse Annotator": 0.3, "Browse Recommender": 0.2}
      }
    }
  ]
}
)cmx";

}  // namespace clickmine::defaults

#endif  // CLICKMINE_DEFAULTS_HPP
