#pragma once

// Reference captures of a live ad render: the publisher-page ad block, the
// ad-frame URL a client-side render produced (origin still contaminated by
// the executing environment), and a resulting signed click URL.

namespace adlab::testfix {

inline constexpr const char* kCapturedAdFrameUrl =
    "http://googleads.g.doubleclick.net/pagead/ads?client=ca-pub-1229649499684927&format=336x280_as&output=html&h=280&adk=3476478377&w=336&lmt=1410413197&num_ads=3&channel=ANUNCIOS.COM&ad_type=text&color_bg=EEEEEE&color_border=EEEEEE&color_link=000066&color_text=000000&color_url=CC0000&oe=utf8&flash=14.0.0&hl=es&url=http%3A%2F%2Flocalhost%2Fvigilante%2Fexploits%2Fexploit2.php&adsafe=high&dt=1410420397140&hpp=10&bd=23&shv=r20140904&cbv=r20140417&saldr=sa&correlator=8467094044672&frm=20&ga_vid=482323067.1410420397&ga_sid=1410420397&ga_hid=2126412725&ga_fc=0&u_tz=120&u_his=2&u_java=1&u_h=900&u_w=1600&u_ah=856&u_aw=1600&u_cd=24&u_nplug=14&u_nmime=100&dff=times%20new%20roman&dfs=16&adx=8&ady=8&biw=1600&bih=795&eid=317150304%2C317150313&oid=3&rx=0&eae=0&fc=8&brdim=0%2C0%2C0%2C1600%2C0%2C1600%2C856%2C1600%2C795&vis=1&abl=CS&ppjl=u&fu=0&ifi=1&xpc=EvP9CmkS4y&p=http%3A//localhost&dtd=50";

inline constexpr const char* kCapturedAdBlockHtml = R"html(<div id="GoogleAdSense">
<script language="JavaScript" type="text/javascript">
  google_ad_client = "pub-1229649499684927";
  google_ad_channel = "ANUNCIOS.COM"
  google_ad_type = "text";
  google_max_num_ads = 3;
  google_language = "es";
  google_safe = "high";
  google_encoding = "utf8";
  google_ad_width = 336;
  google_ad_height = 280;
  google_ad_format = "336x280_as";
  google_color_border = "EEEEEE";
  google_color_bg = "EEEEEE";
  google_color_link = "000066";
  google_color_text = "000000";
  google_color_url = "CC0000";
</script>
<div id="GoogleAd">
<span>Sponsored links </span>
<script language="JavaScript" src="http://pagead2.googlesyndication.com/pagead/show_ads.js"
type="text/javascript"></script>
</div>
</div>)html";

inline constexpr const char* kCapturedClickUrl =
    "http://googleads.g.doubleclick.net/aclk?sa=L&ai=C4_H1q14RVJDHLIHCiQa1zoCICamd6N0E4def75EBwI23ARADIPmY_AEOA1CJtf3UB2DVtdcCyAEBqQKMwFG0Fae1PqgDacgDwwSqBgtP0Kha1_RKM7eChCXVjUsXttFDL1j6od6JU7Fehdmg0GwM8-w6Nhuh9awpyuPhzyt-gKK2kLj6_Fp031A18FoHzX6xXE8VwfiFvy9qq9v3Dk0uA2-n2112aQk0xS6H9aK9d34qv2A9jrYAH2Zf5Lg&num=3&sig=AOD64_1aYwxLbhcZISbWwRtDQhgLRfddmg&client=ca-pub-1229649499684927&adurl=http://www.banderasysoportes.com";

}  // namespace adlab::testfix
