#!/usr/bin/env python3
"""Generates the 50-domain replay corpus under tests/fixtures/corpus.

Output is deterministic: certificates are signed with Ed25519 keys derived
from fixed seeds, so rerunning reproduces the committed bytes.

    python3 tests/fixtures/gen_fixtures.py
"""

import datetime as dt
import hashlib
import json
import shutil
from pathlib import Path

from cryptography import x509
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric import ed25519
from cryptography.x509.oid import NameOID

ROOT = Path(__file__).resolve().parent / "corpus"
NOW = dt.datetime(2019, 2, 1, tzinfo=dt.timezone.utc)

# AS -> (website prefix, nameserver prefix, country)
AS_TABLE = [
    ("104.16.0.0/13", 13335, "Cloudflare, Inc."),
    ("173.245.58.0/24", 13335, "Cloudflare, Inc."),
    ("184.168.0.0/16", 26496, "GoDaddy.com, LLC"),
    ("97.74.0.0/16", 26496, "GoDaddy.com, LLC"),
    ("198.54.112.0/20", 22612, "Namecheap, Inc."),
    ("156.154.132.0/23", 22612, "Namecheap, Inc."),
    ("192.254.0.0/16", 46606, "Unified Layer"),
    ("51.68.0.0/16", 16276, "OVH SAS"),
    ("159.203.0.0/16", 14061, "DigitalOcean, LLC"),
    ("188.166.0.0/16", 14061, "DigitalOcean, LLC"),
    ("199.83.128.0/21", 19551, "Incapsula Inc"),
    ("23.32.0.0/11", 20940, "Akamai International B.V."),
    ("95.100.0.0/16", 20940, "Akamai International B.V."),
    ("151.101.0.0/16", 54113, "Fastly"),
    ("52.0.0.0/11", 16509, "Amazon.com, Inc."),
    ("205.251.192.0/21", 16509, "Amazon.com, Inc."),
    ("216.239.32.0/19", 15169, "Google LLC"),
    ("172.217.0.0/16", 15169, "Google LLC"),
    ("205.171.0.0/16", 209, "CenturyLink Communications, LLC"),
    ("198.51.44.0/24", 62597, "NSONE Inc"),
    ("156.154.64.0/18", 12008, "NeuStar, Inc."),
    # Nested prefix: the /24 inside Cloudflare's /13 belongs to another AS.
    ("104.18.250.0/24", 209, "CenturyLink Communications, LLC"),
    ("2606:4700::/32", 13335, "Cloudflare, Inc."),
]

GEO_TABLE = [
    ("23.32.0.0", "23.63.255.255", "US"),
    ("51.68.0.0", "51.68.255.255", "FR"),
    ("52.0.0.0", "52.31.255.255", "US"),
    ("95.100.0.0", "95.100.255.255", "US"),
    ("97.74.0.0", "97.74.255.255", "US"),
    ("104.16.0.0", "104.23.255.255", "US"),
    ("151.101.0.0", "151.101.255.255", "US"),
    ("156.154.64.0", "156.154.127.255", "US"),
    ("156.154.132.0", "156.154.133.255", "US"),
    ("159.203.0.0", "159.203.255.255", "US"),
    ("172.217.0.0", "172.217.255.255", "US"),
    ("173.245.58.0", "173.245.58.255", "US"),
    ("184.168.0.0", "184.168.255.255", "US"),
    ("188.166.0.0", "188.166.255.255", "NL"),
    ("192.254.0.0", "192.254.255.255", "US"),
    ("198.51.44.0", "198.51.44.255", "US"),
    ("198.54.112.0", "198.54.127.255", "US"),
    ("199.83.128.0", "199.83.135.255", "US"),
    ("205.171.0.0", "205.171.255.255", "US"),
    ("205.251.192.0", "205.251.199.255", "US"),
    ("216.239.32.0", "216.239.63.255", "US"),
    ("2606:4700::", "2606:4700:ffff:ffff:ffff:ffff:ffff:ffff", "US"),
]

# Website address prefix per hosting AS token.
HOST_NET = {
    "AS13335": "104.16.{}.{}",
    "AS26496": "184.168.{}.{}",
    "AS22612": "198.54.{}.{}",
    "AS46606": "192.254.{}.{}",
    "AS16276": "51.68.{}.{}",
    "AS14061": "159.203.{}.{}",
    "AS19551": "199.83.{}.{}",
    "AS20940": "23.32.{}.{}",
    "AS54113": "151.101.{}.{}",
    "AS16509": "52.1.{}.{}",
    "AS15169": "172.217.{}.{}",
    "AS209": "205.171.{}.{}",
}

# Nameserver SLD -> address pattern (mirrors the synthetic generator's pairs).
NS_NET = {
    "cloudflare.com": "173.245.58.{}",
    "domaincontrol.com": "97.74.{}.10",
    "registrar-servers.com": "156.154.132.{}",
    "hostgator.com": "192.254.{}.2",
    "bluehost.com": "192.254.{}.3",
    "ovh.net": "51.68.{}.5",
    "nsone.net": "198.51.44.{}",
    "qwest.net": "205.171.{}.4",
    "akam.net": "95.100.{}.6",
    "awsdns-01.com": "205.251.192.{}",
    "ultradns.net": "156.154.{}.1",
    "googledomains.com": "216.239.{}.7",
}

ISSUERS = {
    "Let's Encrypt": ("US", "Let's Encrypt Authority X3"),
    "Cloudflare, Inc.": ("US", "CloudFlare Inc ECC CA-2"),
    "COMODO CA Limited": ("GB", "COMODO ECC Domain Validation Secure Server CA 2"),
    "cPanel, Inc.": ("US", "cPanel, Inc. Certification Authority"),
    "GoDaddy.com, Inc.": ("US", "Go Daddy Secure Certificate Authority - G2"),
    "Sectigo Limited": ("GB", "Sectigo RSA Domain Validation Secure Server CA"),
    "DigiCert Inc": ("US", "DigiCert SHA2 Secure Server CA"),
    "GlobalSign nv-sa": ("BE", "GlobalSign Organization Validation CA - SHA256 - G2"),
    "Amazon": ("US", "Amazon"),
    "Google Trust Services": ("US", "Google Internet Authority G3"),
}


def key_for(label):
    seed = hashlib.sha256(("fixture-key:" + label).encode()).digest()
    return ed25519.Ed25519PrivateKey.from_private_bytes(seed)


def octets(domain, n=2):
    h = hashlib.sha256(domain.encode()).digest()
    return [1 + h[i] % 250 for i in range(n)]


def make_cert(domain, issuer, sans, lifetime, age, subject_org=None, self_signed=False):
    subject_attrs = [x509.NameAttribute(NameOID.COMMON_NAME, domain)]
    if subject_org:
        subject_attrs.insert(0, x509.NameAttribute(NameOID.ORGANIZATION_NAME, subject_org))
    subject = x509.Name(subject_attrs)
    if self_signed:
        issuer_name = subject
        signer = key_for("site:" + domain)
    else:
        country, cn = ISSUERS[issuer]
        issuer_name = x509.Name([
            x509.NameAttribute(NameOID.COUNTRY_NAME, country),
            x509.NameAttribute(NameOID.ORGANIZATION_NAME, issuer),
            x509.NameAttribute(NameOID.COMMON_NAME, cn),
        ])
        signer = key_for("ca:" + issuer)
    not_before = NOW - dt.timedelta(days=age)
    builder = (
        x509.CertificateBuilder()
        .subject_name(subject)
        .issuer_name(issuer_name)
        .public_key(key_for("site:" + domain).public_key())
        .serial_number(int.from_bytes(hashlib.sha256(domain.encode()).digest()[:8], "big"))
        .not_valid_before(not_before)
        .not_valid_after(not_before + dt.timedelta(days=lifetime))
    )
    if sans:
        builder = builder.add_extension(x509.SubjectAlternativeName([x509.DNSName(s) for s in sans]), critical=False)
    cert = builder.sign(signer, algorithm=None)
    return cert.public_bytes(serialization.Encoding.PEM).decode()


def whois_text(domain, registrar, org, country, created, updated, expires):
    lines = [
        f"Domain Name: {domain.upper()}",
        "Registry Domain ID: 0000000000_DOMAIN_COM-VRSN",
        f"Registrar WHOIS Server: whois.{registrar.split(',')[0].split()[0].lower()}",
        f"Updated Date: {updated:%Y-%m-%dT%H:%M:%SZ}",
        f"Creation Date: {created:%Y-%m-%dT%H:%M:%SZ}",
        f"Registry Expiry Date: {expires:%Y-%m-%dT%H:%M:%SZ}",
        f"Registrar: {registrar}",
    ]
    if org is not None:
        lines.append(f"Registrant Organization: {org}")
    if country is not None:
        lines.append(f"Registrant Country: {country}")
    lines.append(f"Name Server: NS1.{domain.upper()}")
    lines.append(">>> Last update of whois database: 2019-02-01T00:00:00Z <<<")
    return "\n".join(lines) + "\n"


def page(domain, wordpress, theme=None, plugins=(), filler=0):
    head = [f"<!DOCTYPE html><html><head><title>{domain}</title>"]
    if wordpress:
        head.append('<meta name="generator" content="WordPress 5.0.3" />')
        if theme:
            head.append(f"<link rel='stylesheet' href='https://{domain}/wp-content/themes/{theme}/style.css' />")
        for p in plugins:
            head.append(f"<script src='https://{domain}/wp-content/plugins/{p}/js/main.js'></script>")
        head.append(f"<script src='https://{domain}/wp-includes/js/wp-embed.min.js'></script>")
    head.append("</head><body><h1>Welcome</h1>")
    body = "\n".join(head)
    if filler:
        body += "\n" + ("<p>" + "lorem ipsum dolor sit amet " * 8 + "</p>\n") * filler
    return body + "</body></html>\n"


def site(domain, label, feed, *, registrar, org, country, age, to_expiry, updated_ago, ns, host_as,
         issuer=None, sans=None, lifetime=90, cert_age=20, subject_org=None, self_signed=False,
         wordpress=False, theme=None, plugins=(), special=None):
    return dict(domain=domain, label=label, feed=feed, registrar=registrar, org=org, country=country, age=age,
                to_expiry=to_expiry, updated_ago=updated_ago, ns=ns, host_as=host_as, issuer=issuer, sans=sans,
                lifetime=lifetime, cert_age=cert_age, subject_org=subject_org, self_signed=self_signed,
                wordpress=wordpress, theme=theme, plugins=tuple(plugins), special=special)


def wide_sans(domain, n):
    return [domain, "*." + domain] + [f"cdn{i}.{domain}" for i in range(n - 2)]


def shared_sans(domain, n):
    return [f"sni{i}.cloudflaressl.com" if i == 0 else f"customer{i}-site.com" for i in range(n - 1)] + [domain]


DISINFO = [
    site("channel24news.com", "disinformation", "registration",
         registrar="NameCheap, Inc.", org="WhoisGuard, Inc.", country="PA", age=30, to_expiry=335, updated_ago=30,
         ns="registrar-servers.com", host_as="AS13335", issuer="Let's Encrypt",
         sans=["channel24news.com", "www.channel24news.com"], lifetime=90, cert_age=28,
         wordpress=True, theme="Newspaper", plugins=["wordpress-seo", "jetpack", "contact-form-7"]),
    site("empirenews.net", "disinformation", "certificate",
         registrar="GoDaddy.com, LLC", org="Domains By Proxy, LLC", country="US", age=200, to_expiry=165,
         updated_ago=40, ns="domaincontrol.com", host_as="AS26496", sans=["empirenews.net", "www.empirenews.net"],
         lifetime=365, cert_age=100, self_signed=True,
         wordpress=True, theme="Newsmag", plugins=["contact-form-7", "akismet", "facebook-comments"]),
    site("patriotherald.xyz", "disinformation", "registration",
         registrar="eNom, LLC", org="patriot media llc", country="MK", age=90, to_expiry=275, updated_ago=90,
         ns="hostgator.com", host_as="AS46606", issuer="COMODO CA Limited",
         sans=shared_sans("patriotherald.xyz", 2), lifetime=180, cert_age=60,
         wordpress=True, theme="mh-magazine", plugins=["wordpress-seo", "facebook-comments", "wp-super-cache"]),
]

NEWS_REGISTRARS = ["MarkMonitor Inc.", "CSC Corporate Domains, Inc.", "Network Solutions, LLC", "GoDaddy.com, LLC"]
NEWS_ORGS = ["Gannett Co., Inc.", "Lee Enterprises", "Sinclair Broadcast Group", "Tribune Publishing", "McClatchy"]
NEWS_NS = ["nsone.net", "akam.net", "awsdns-01.com", "ultradns.net", "qwest.net"]
NEWS_HOSTS = ["AS19551", "AS20940", "AS54113", "AS16509"]
NEWS_ISSUERS = ["DigiCert Inc", "GlobalSign nv-sa", "DigiCert Inc", "Amazon"]

NEWS_DOMAINS = [
    ("springfieldherald.com", "registration", None),
    ("riversidetribune.com", "registration", None),
    ("thefairviewgazette.com", "registration", None),
    ("madisonchronicle.com", "registration", "redirect_chain"),
    ("georgetowntimes.com", "registration", None),
    ("clintonjournal.com", "registration", None),
    ("franklinobserver.com", "registration", None),
    ("greenvillecourier.com", "registration", None),
    ("bristolpress.co.uk", "registration", None),
    ("salemdispatch.com", "registration", None),
    ("daytonledger.com", "registration", "https_fails"),
    ("lakesidereview.com", "registration", None),
    ("hudsonnews.com", "certificate", None),
    ("marionpost.com", "certificate", None),
    ("dailyoakland.com", "certificate", None),
    ("theriversidedaily.org", "certificate", None),
    ("journalmadison.net", "certificate", None),
]

OTHER_REGISTRARS = ["GoDaddy.com, LLC", "Google LLC", "Tucows Domains Inc.", "Name.com, Inc.", "MarkMonitor Inc."]
OTHER_NS = ["awsdns-01.com", "googledomains.com", "cloudflare.com", "awsdns-01.com", "nsone.net"]
OTHER_HOSTS = ["AS16509", "AS15169", "AS16509", "AS54113", "AS14061", "AS15169"]
OTHER_ISSUERS = ["Amazon", "Google Trust Services", "Let's Encrypt", "DigiCert Inc", "Amazon"]

OTHER_DOMAINS = [
    ("bluegarden.com", "certificate", None),
    ("smartcloud.io", "certificate", None),
    ("craftpixel.io", "certificate", "malformed_cert"),
    ("greenhome.com", "certificate", None),
    ("travelrecipe.com", "certificate", None),
    ("fitnesstech.com", "certificate", None),
    ("photostudio.net", "certificate", None),
    ("designmarket.com", "certificate", None),
    ("petgame.org", "certificate", None),
    ("musicbook.com", "certificate", None),
    ("autosolar.com", "certificate", None),
    ("solarcoffee.com", "certificate", "stalling"),
    ("yogabike.com", "certificate", None),
    ("coffeeyoga.com", "certificate", None),
    ("pixelgarden.com", "certificate", None),
    ("cloudhome.io", "social", None),
    ("greentravel.org", "social", None),
    ("recipebook.net", "social", None),
    ("techstudio.co", "social", None),
    ("marketphoto.com", "social", None),
    ("gamemusic.com", "social", None),
    ("bookauto.com", "social", None),
    ("coffeefitness.com", "social", None),
    ("pet-design.com", "social", None),
    ("bluepixel.com", "social", None),
    ("studiogreen.com", "social", None),
    ("bikecoffee.com", "social", "large_body"),
    ("homegarden.com", "social", "refusing"),
    ("shopsolar.com", "social", None),
    ("designcraft.io", "social", None),
]


def news_sites():
    out = []
    for i, (domain, feed, special) in enumerate(NEWS_DOMAINS):
        wp = i % 6 == 5
        out.append(site(
            domain, "news", feed,
            registrar=NEWS_REGISTRARS[i % len(NEWS_REGISTRARS)], org=NEWS_ORGS[i % len(NEWS_ORGS)], country="US",
            age=2500 + 370 * i, to_expiry=500 + 90 * i, updated_ago=100 + 20 * i,
            ns=NEWS_NS[i % len(NEWS_NS)], host_as=NEWS_HOSTS[i % len(NEWS_HOSTS)],
            issuer=NEWS_ISSUERS[i % len(NEWS_ISSUERS)], sans=wide_sans(domain, 12 + 7 * i),
            lifetime=730 if i % 4 != 3 else 395, cert_age=60 + 10 * i,
            subject_org=NEWS_ORGS[i % len(NEWS_ORGS)] if i % 4 != 3 else None,
            wordpress=wp, theme="jnews" if wp else None, plugins=["wp-super-cache"] if wp else (),
            special=special))
    return out


def other_sites():
    out = []
    for i, (domain, feed, special) in enumerate(OTHER_DOMAINS):
        wp = i % 3 == 0
        privacy = i % 4 == 1
        registrar = OTHER_REGISTRARS[i % len(OTHER_REGISTRARS)]
        out.append(site(
            domain, "other", feed,
            registrar=registrar,
            org="REDACTED FOR PRIVACY" if privacy else domain.split(".")[0] + " inc.",
            country=None if privacy else "US",
            age=900 + 137 * i, to_expiry=120 + 41 * i, updated_ago=60 + 9 * i,
            ns=OTHER_NS[i % len(OTHER_NS)], host_as=OTHER_HOSTS[i % len(OTHER_HOSTS)],
            issuer=OTHER_ISSUERS[i % len(OTHER_ISSUERS)], sans=[domain, "www." + domain] + [f"app.{domain}"] * (i % 3 == 2),
            lifetime={"Amazon": 395, "DigiCert Inc": 730}.get(OTHER_ISSUERS[i % len(OTHER_ISSUERS)], 90),
            cert_age=10 + i,
            wordpress=wp, theme=["astra", "Divi", "twentyseventeen"][i % 3] if wp else None,
            plugins=[["woocommerce", "elementor"], ["contact-form-7"], ["woocommerce"]][i % 3] if wp else (),
            special=special))
    return out


def write_site(s):
    domain = s["domain"]
    special = s["special"]
    if special == "refusing":
        return  # no directory: every protocol refuses
    d = ROOT / "sites" / domain
    d.mkdir(parents=True)
    a, b = octets(domain)

    ns_sld = s["ns"]
    ns_hosts = [f"ns1.{ns_sld}", f"ns2.{ns_sld}"]
    pattern = NS_NET[ns_sld]
    nameservers = [{"host": h, "addresses": [pattern.format(a if j == 0 else b)]} for j, h in enumerate(ns_hosts)]
    address = HOST_NET[s["host_as"]].format(a, b)
    (d / "dns.json").write_text(json.dumps({"addresses": [address], "nameservers": nameservers}, indent=2) + "\n")

    created = NOW - dt.timedelta(days=s["age"])
    updated = NOW - dt.timedelta(days=min(s["updated_ago"], s["age"]))
    expires = NOW + dt.timedelta(days=s["to_expiry"])
    (d / "whois.txt").write_text(whois_text(domain, s["registrar"], s["org"], s["country"], created, updated, expires))

    if special == "malformed_cert":
        (d / "cert.pem").write_text("-----BEGIN CERTIFICATE-----\nTUlJQ0lqQ0NBWXVnQXdJQkFnSUpB\n"
                                    "-----END CERTIFICATE-----\n")
    elif special != "https_fails":
        (d / "cert.pem").write_text(make_cert(domain, s["issuer"], s["sans"], s["lifetime"], s["cert_age"],
                                              subject_org=s["subject_org"], self_signed=s["self_signed"]))

    html = page(domain, s["wordpress"], s["theme"], s["plugins"], filler=3000 if special == "large_body" else 0)
    headers = [["Content-Type", "text/html; charset=UTF-8"], ["Server", "nginx"]]
    if s["wordpress"]:
        headers.append(["Link", f"<https://{domain}/wp-json/>; rel=\"https://api.w.org/\""])
    responses = []
    if special == "redirect_chain":
        responses += [
            {"url": f"https://{domain}/", "status": 301, "headers": [["Location", "/home"]]},
            {"url": f"https://{domain}/home", "status": 302, "headers": [["Location", f"https://{domain}/en/"]]},
            {"url": f"https://{domain}/en/", "status": 200, "headers": headers, "body": html},
        ]
    elif special == "https_fails":
        responses.append({"url": f"http://{domain}/", "status": 200, "headers": headers, "body": html})
    elif special == "large_body":
        (d / "body.html").write_text(html)
        responses.append({"url": f"https://{domain}/", "status": 200, "headers": headers, "body_file": "body.html"})
    else:
        responses.append({"url": f"https://{domain}/", "status": 200, "headers": headers, "body": html})
        responses.append({"url": f"http://{domain}/", "status": 301, "headers": [["Location", f"https://{domain}/"]]})
    (d / "http.json").write_text(json.dumps({"responses": responses}, indent=2) + "\n")

    if special == "stalling":
        (d / "timing.json").write_text(json.dumps({"dns": 5, "whois": 5, "tls": 5, "http": 5000}) + "\n")


def ts(minutes):
    return (NOW + dt.timedelta(minutes=minutes)).strftime("%Y-%m-%dT%H:%M:%SZ")


def write_feeds(sites):
    feeds = ROOT / "feeds"
    feeds.mkdir(parents=True)
    reg, cert, social = [], [], []
    by_feed = {"registration": reg, "certificate": cert, "social": social}
    for i, s in enumerate(sites):
        by_feed[s["feed"]].append((i, s["domain"]))

    lines = []
    t = 0
    for k, (_, domain) in enumerate(reg):
        t += 7
        lines.append({"ts": ts(t), "domain": domain})
        if k == 3:
            t += 1
            lines.append({"ts": ts(t), "domain": "bluepixelgarden.com"})  # no keyword: filtered
        if k == 6:
            t += 1
            lines.append({"ts": ts(t), "domain": "craftsolar.net"})  # filtered
            lines.append({"ts": ts(t - 30), "domain": "olddaily.com"})  # goes backwards: dropped
        if k == 9:
            t += 1
            lines.append({"ts": ts(t), "domain": "petcoffee.org"})  # filtered
    reg_text = [json.dumps(l) for l in lines]
    reg_text.insert(5, '{"ts": "2019-02-01T00:36:00Z", "domain": ')  # truncated record
    (feeds / "registration.jsonl").write_text("\n".join(reg_text) + "\n")

    lines = []
    t = 3
    for k, (_, domain) in enumerate(cert):
        t += 6
        sans = ["www." + domain, domain]
        if domain == "empirenews.net":
            sans = ["EmpireNews.net", "*.empirenews.net"]
        lines.append({"ts": ts(t), "san_list": sans, "issuer": "example"})
        if k == 4:
            t += 1
            lines.append({"ts": ts(t), "san_list": ["*.thefairviewgazette.com"], "issuer": "example"})  # duplicate
    lines.append({"ts": ts(t + 1), "san_list": ["10.0.0.1"], "issuer": "example"})  # no usable hostname
    (feeds / "certificate.jsonl").write_text("\n".join(json.dumps(l) for l in lines) + "\n")

    lines = []
    t = 5
    for k, (_, domain) in enumerate(social):
        t += 5
        lines.append({"ts": ts(t), "text": f"Have you seen this? https://www.{domain}/article/{k}?utm_source=feed"})
        if k == 2:
            t += 1
            lines.append({"ts": ts(t), "text": "no link in this post, just words"})
        if k == 8:
            t += 1
            lines.append({"ts": ts(t), "text": "again http://cloudhome.io/x"})  # duplicate within window
    (feeds / "social.jsonl").write_text("\n".join(json.dumps(l) for l in lines) + "\n")


def main():
    if ROOT.exists():
        shutil.rmtree(ROOT)
    ROOT.mkdir(parents=True)
    sites = DISINFO + news_sites() + other_sites()
    assert len(sites) == 50 and len({s["domain"] for s in sites}) == 50
    for s in sites:
        write_site(s)
    write_feeds(sites)

    certs = ROOT / "certs"
    certs.mkdir()
    (certs / "example.pem").write_text(make_cert("example.com", "Let's Encrypt", ["example.com", "www.example.com"], 90, 10))
    (certs / "zero_lifetime.pem").write_text(make_cert("zero.example", "Sectigo Limited", ["zero.example"], 0, 5))

    (ROOT / "asn_table.tsv").write_text(
        "# prefix<TAB>asn<TAB>name\n" + "".join(f"{p}\tAS{n}\t{name}\n" for p, n, name in AS_TABLE))
    (ROOT / "geo_table.csv").write_text(
        "start_ip,end_ip,country\n" + "".join(f"{a},{b},{c}\n" for a, b, c in GEO_TABLE))
    (ROOT / "labels.csv").write_text(
        "domain,label,special\n" + "".join(f"{s['domain']},{s['label']},{s['special'] or ''}\n" for s in sites))
    config = {
        "feeds": {"registration": "feeds/registration.jsonl", "certificate": "feeds/certificate.jsonl",
                  "social": "feeds/social.jsonl"},
        "fixtures": "sites",
        "asn_table": "asn_table.tsv",
        "geo_table": "geo_table.csv",
        "workers": 8,
        "probe": {"timeout_ms": 300},
    }
    (ROOT / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
