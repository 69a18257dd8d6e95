use careertrace_core::indicators::{
    class_intl_share, copub_direction, intl_copub, output_share, AttributedCorpus, ClassSelector,
    Counting, Population,
};
use careertrace_core::mobility::resolve_home;
use careertrace_core::{
    build_timelines, classify, detect_moves, AuthorIndex, Authorship, CountryCode, Corpus,
    Error, HostAttribution, MobilityState, PublicationRecord, RegionScheme, YearWindow,
};

fn scheme() -> RegionScheme {
    let cc = |s: &str| CountryCode::new(s).unwrap();
    RegionScheme::new(
        vec![
            ("CHN".into(), vec![cc("CHN")]),
            ("USA".into(), vec![cc("USA")]),
            ("EU28".into(), vec![cc("DEU"), cc("FRA")]),
        ],
        vec!["CHN".into(), "USA".into(), "EU28".into(), "OTHER".into()],
    )
    .unwrap()
}

fn rec(id: &str, year: i32, authors: &[(&str, &[&str])]) -> PublicationRecord {
    PublicationRecord {
        pub_id: id.into(),
        year,
        seq: 0,
        field_codes: vec!["F".into()],
        doc_type: "ar".into(),
        citation_count: 1,
        authorships: authors
            .iter()
            .map(|(a, cs)| Authorship {
                author_id: a.to_string(),
                affiliation_countries: cs.iter().map(|c| CountryCode::new(c).unwrap()).collect(),
            })
            .collect(),
    }
}

/// Career records putting `author` in CHN 2005 and in country `host` 2007.
fn returnee_history(author: &str, host: &'static str) -> Vec<PublicationRecord> {
    vec![
        rec(&format!("{author}-h1"), 2005, &[(author, &["CHN"])]),
        rec(&format!("{author}-h2"), 2007, &[(author, &[host])]),
    ]
}

struct Fixture {
    corpus: Corpus,
    index: AuthorIndex,
    states: Vec<Vec<MobilityState>>,
}

impl Fixture {
    fn new(records: Vec<PublicationRecord>) -> Self {
        let corpus = Corpus::new(records, scheme(), YearWindow::default()).unwrap();
        let index = AuthorIndex::new(&corpus);
        let home = resolve_home(corpus.scheme(), "CHN").unwrap();
        let states = build_timelines(&corpus)
            .iter()
            .map(|t| classify(t, &detect_moves(t), home, HostAttribution::Latest))
            .collect();
        Fixture {
            corpus,
            index,
            states,
        }
    }

    fn ctx(&self) -> AttributedCorpus<'_> {
        AttributedCorpus::new(&self.corpus, &self.index, &self.states, false).unwrap()
    }

    fn id(&self, label: &str) -> careertrace_core::RegionId {
        self.corpus.scheme().id(label).unwrap()
    }
}

#[test]
fn domestic_only_record_has_zero_returnee_share() {
    let f = Fixture::new(vec![rec("p", 2014, &[("d", &["CHN"])])]);
    let chn = f.id("CHN");
    let share = output_share(
        &f.ctx(),
        Population::class_in(chn, ClassSelector::Returnee(None)),
        Population::region(chn),
        2014,
        Counting::Fractional,
    )
    .unwrap();
    assert_eq!(share, 0.0);
}

#[test]
fn returnee_and_domestic_coauthors() {
    let mut records = returnee_history("r", "USA");
    records.push(rec("p", 2014, &[("r", &["CHN"]), ("d", &["CHN"])]));
    let f = Fixture::new(records);
    let ctx = f.ctx();
    let chn = f.id("CHN");
    let i = f.corpus.records().iter().position(|r| r.pub_id == "p").unwrap();
    let w = ctx.weight(i, &Population::class_in(chn, ClassSelector::Returnee(Some(f.id("USA")))));
    assert_eq!(w.frac, 0.5);
    assert_eq!(w.full, 1.0);
}

#[test]
fn thirteen_of_hundred_units_are_returnee() {
    let mut records = Vec::new();
    for k in 0..100 {
        let author = format!("a{k:03}");
        if k < 13 {
            records.extend(returnee_history(&author, "USA"));
        }
        records.push(rec(&format!("p{k:03}"), 2014, &[(author.as_str(), &["CHN"])]));
    }
    let f = Fixture::new(records);
    let chn = f.id("CHN");
    let ctx = f.ctx();
    for c in Counting::BOTH {
        let share = output_share(
            &ctx,
            Population::class_in(chn, ClassSelector::Returnee(None)),
            Population::region(chn),
            2014,
            c,
        )
        .unwrap();
        assert!((share - 0.13).abs() < 1e-12, "{c}: {share}");
    }
}

#[test]
fn empty_reference_is_an_error() {
    let f = Fixture::new(vec![rec("p", 2014, &[("d", &["USA"])])]);
    let chn = f.id("CHN");
    let r = output_share(&f.ctx(), Population::WORLD, Population::region(chn), 2014, Counting::Full);
    assert_eq!(r, Err(Error::EmptyReference));
}

#[test]
fn intl_copub_examples() {
    let s = scheme();
    let chn = s.id("CHN").unwrap();
    let usa = s.id("USA").unwrap();
    let eu = s.id("EU28").unwrap();

    let domestic = rec("p", 2010, &[("a", &["CHN"]), ("b", &["CHN"])]);
    assert!(!intl_copub(&domestic, &s, false).international);

    let pair = rec("p", 2010, &[("a", &["CHN"]), ("b", &["USA"])]);
    let info = intl_copub(&pair, &s, false);
    assert!(info.international);
    assert_eq!(info.region_pairs, [(chn, usa)]);

    let dual = rec("p", 2010, &[("a", &["CHN", "USA"])]);
    let info = intl_copub(&dual, &s, false);
    assert!(info.international);
    assert_eq!(info.region_pairs, [(chn, usa)]);
    assert!(!intl_copub(&dual, &s, true).international);

    // two EU members: international, and an intra-region pair
    let eu_only = rec("p", 2010, &[("a", &["DEU"]), ("b", &["FRA"])]);
    let info = intl_copub(&eu_only, &s, false);
    assert!(info.international);
    assert_eq!(info.region_pairs, [(eu, eu)]);
}

#[test]
fn class_intl_share_half() {
    let mut records = returnee_history("r", "USA");
    records.push(rec("p1", 2014, &[("r", &["CHN"]), ("x", &["DEU"])]));
    records.push(rec("p2", 2014, &[("d", &["CHN"]), ("y", &["DEU"])]));
    let f = Fixture::new(records);
    let (chn, usa) = (f.id("CHN"), f.id("USA"));
    let ctx = f.ctx();
    for c in Counting::BOTH {
        let share = class_intl_share(&ctx, chn, ClassSelector::Returnee(Some(usa)), 2014, c).unwrap();
        assert!((share - 0.5).abs() < 1e-12);
    }
}

#[test]
fn class_intl_share_needs_international_records() {
    let f = Fixture::new(vec![rec("p", 2014, &[("d", &["CHN"])])]);
    let r = class_intl_share(&f.ctx(), f.id("CHN"), ClassSelector::Domestic, 2014, Counting::Fractional);
    assert_eq!(r, Err(Error::EmptyReference));
}

#[test]
fn class_intl_share_twenty_seven_percent() {
    let mut records = Vec::new();
    for k in 0..100 {
        let author = format!("a{k:03}");
        if k < 27 {
            records.extend(returnee_history(&author, "DEU"));
        }
        records.push(rec(
            &format!("p{k:03}"),
            2014,
            &[(author.as_str(), &["CHN"]), ("guest", &["FRA"])],
        ));
    }
    let f = Fixture::new(records);
    let ctx = f.ctx();
    let share = class_intl_share(&ctx, f.id("CHN"), ClassSelector::Returnee(None), 2014, Counting::Fractional)
        .unwrap();
    assert!((share - 0.27).abs() < 1e-9);
}

#[test]
fn eu_returnee_direction() {
    let mut records = returnee_history("r", "DEU");
    records.push(rec("p1", 2014, &[("r", &["CHN"]), ("x", &["DEU"])]));
    records.push(rec("p2", 2014, &[("d", &["CHN"]), ("y", &["USA"])]));
    let f = Fixture::new(records);
    let (chn, usa, eu) = (f.id("CHN"), f.id("USA"), f.id("EU28"));
    let ctx = f.ctx();
    let class = ClassSelector::Returnee(Some(eu));
    let toward_eu = copub_direction(&ctx, chn, class, eu, 2014, Counting::Fractional).unwrap();
    let toward_us = copub_direction(&ctx, chn, class, usa, 2014, Counting::Fractional).unwrap();
    assert!(toward_eu > 0.0);
    assert_eq!(toward_us, 0.0);
    assert_eq!(
        copub_direction(&ctx, chn, class, f.id("OTHER"), 2014, Counting::Fractional),
        Err(Error::EmptyReference)
    );
}

#[test]
fn home_output_partitions_over_classes() {
    let mut records = returnee_history("r", "USA");
    // USA-origin author working in CHN: overseas with host CHN
    records.push(rec("u1", 2005, &[("u", &["USA"])]));
    records.push(rec("u2", 2014, &[("u", &["CHN"]), ("r", &["CHN", "DEU"])]));
    records.push(rec("d1", 2014, &[("d", &["CHN"]), ("e", &["FRA"])]));
    // CHN-origin author abroad with a residual CHN affiliation
    records.push(rec("o1", 2005, &[("o", &["CHN"])]));
    records.push(rec("o2", 2014, &[("o", &["USA", "USA", "CHN"])]));
    let f = Fixture::new(records);
    let chn = f.id("CHN");
    let ctx = f.ctx();
    let parts = [
        ClassSelector::Domestic,
        ClassSelector::Overseas(None),
        ClassSelector::Returnee(None),
    ];
    let whole = output_share(&ctx, Population::region(chn), Population::WORLD, 2014, Counting::Fractional)
        .unwrap();
    let sum: f64 = parts
        .iter()
        .map(|&c| {
            output_share(&ctx, Population::class_in(chn, c), Population::WORLD, 2014, Counting::Fractional)
                .unwrap()
        })
        .sum();
    assert!((sum - whole).abs() < 1e-12, "{sum} vs {whole}");
}
