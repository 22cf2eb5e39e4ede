"""Bundled common-noun lexicon for the offline mention tagger.

Curated list of frequent English nouns, skewed toward news vocabulary.
Singular and common plural forms are listed separately (no stemming
happens at tagging time).
"""

_WORDS = """
accident account accusation act action activist activists administration
agency agenda agreement aid air airline airport alliance ambulance analysis
analyst announcement apartment appeal application appointment approval area
argument army arrest arrival article assault assembly assessment asset
assets attack attacker attacks attempt attention auction audience audit
authority authorities award baby ballot bank banks battle beach bill bills
blast blaze blockade blog board boat bomb bombing border boss boycott boy
branch breach break bridge briefing broadcast budget building buildings bus
business businesses cabinet campaign campaigner campaigners candidate
candidates capital car cars case cases cash ceasefire celebration cell
census center centre ceremony chain chair chairman challenge champion
championship chance change changes chaos chapter charge charges charity
chief child children church citizen citizens city claim claims clash
clashes class client climate clinic closure club coach coalition coast code
collapse college comment comments commission commissioner committee
community companies company compensation competition complaint complaints
compromise concern concerns concert conference confidence conflict congress
connection consent consequence conservation conspiracy constitution
construction consumer consumers contest contract contracts control
controversy convention conviction corruption cost costs council councillor
countries country county coup couple court courts coverage crackdown crash
credit crew crime crimes criminal crisis criticism crowd culture currency
customer customers cut cuts cyclone damage danger data date daughter day
days deadline deal deals death deaths debate debt decade decision decisions
declaration decline defeat defence defense deficit delay delegation demand
demands democracy demonstration demonstrators department departure deputy
detail details detective development device devices disaster discovery
discussion disease dispute disruption district doctor doctors document
documents dollar dollars donation door draft drama drive driver drivers
drop drought drug drugs earthquake economy editor education effect effort
efforts election elections electorate electricity embassy emergency
employee employees employer employment end energy engine engineer
engineering enquiry environment epidemic episode era error escape estate
event events evidence exam examination example exchange executive exit
expansion expense experience expert experts explosion export exports
facility fact factory failure family fans fare farm farmer farmers father
fault fear fears federation fee fees festival field fight figure figures
file finance finances findings fine fire firefighter firefighters firm
firms flight flights flood flooding floods floor flu food force forces
forecast form fortune forum fraud front fuel fund funding funds funeral
future gain game games gang gap gas gathering general girl government
governments governor grant group groups growth guard guards gun guns hall
harbour headline headquarters health hearing heat help holiday home homes
hospital hospitals hostage hotel hour hours house household households
housing hurricane idea immigration impact import imports incident incidents
income increase industry inflation information infrastructure initiative
injury inquiry inspection inspector insurance interest interview
investigation investigators investment investor investors island issue
issues jail job jobs journalist journalists journey judge judges jury
justice kid kids killing king laboratory labour land landslide law laws
lawsuit lawyer lawyers leader leaders leadership league leak legislation
letter level levy licence life line list loan loans lobby location
lockdown loss losses man management manager mandate march margin market
markets marriage match mayor measure measures media meeting meetings
member members memo memorial men merger message midnight migrant migrants
military mine minister ministers ministry minute mission mob model money
month months morning mortgage mosque mother motion motorway movement
murder museum nation negotiation negotiations neighbourhood network news
newspaper night nomination notice number nurse nurses offence offer office
officer officers official officials oil operation operations opinion
opposition order outage outbreak outcome outrage oversight owner owners
package pact panel parade parliament part particulars party passenger
passengers pay payment payments peace penalty pension pensions people
percent performance period permit person petition petrol phone picture
pipeline plan plane plans plant platform players pledge plot point police
policy politician politicians politics poll polls pollution population
port position poverty power powers president press pressure price prices
prison prisoner prisoners probe problem problems proceedings process
producer product production products professor profit profits programme
project projects promise proposal proposals prosecution prosecutor protest
protester protesters protests province public pupil pupils quarter queen
question questions raid rail rain rally rate rates reaction rebel rebels
recession record records recovery referee referendum reform reforms refuge
refugee refugees region regulation regulations regulator release relief
report reporter reports rescue research reserve residents resignation
resolution response restaurant result results retailer revenue review
revolt reward right rights riot riots risk river road roads round route
row rule rules ruling rumour sale sales sanction sanctions scandal scene
scheme school schools scientist scientists sea search season seat seats
sector security senate senator sentence series service services session
settlement share shares ship shock shooting shop shops shortage side siege
sign site sites situation soldier soldiers son source sources speaker
speech spending spill spokesman spokesperson sport square stadium staff
stage stake standard standards state statement states station statistics
status steel stock stocks store storm strategy street streets strike
strikes student students study submission subsidy suburb summit supply
support supporter supporters surge survey suspect suspects system systems
talk talks target tax taxes taxpayer taxpayers teacher teachers team teams
technology term terms territory terror terrorism test testimony tests
theatre threat threats time title today tonight tour tourism tourist
tourists tower town trade traffic tragedy train training transcript
transfer transition transport treatment treaty trial tribunal troops truck
trust truth turnout unemployment union unions university unrest update
uprising value van vehicle vehicles verdict victim victims victory video
village violence visit vote voters votes wage wages walkout war warning
warnings warrant water waters wave weapon weapons weather website week
weekend weeks welfare wind winner witness witnesses woman women worker
workers workforce world year years youth zone
"""

COMMON_NOUNS = frozenset(_WORDS.split())
