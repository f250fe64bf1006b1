"""Familiar-word lists for the vocabulary-based readability formulas.

The embedded sets below are small test subsets of the published familiar-word
lists, versioned together with the fixtures that depend on them. Production
use should supply the full lists as newline-delimited UTF-8 files via
:func:`load_word_list` (one lowercase word per line, '#' comments allowed).
"""

from __future__ import annotations

from pathlib import Path

_DALE_CHALL_SUBSET = """
a about across act afraid after afternoon again against ago air all almost
alone along already also always am among an and animal another answer any
anyone anything appear apple are arm around as ask at ate away baby back bad
bag ball banana be bear beautiful became because become bed been before began
begin behind being believe bell belong below beside best better between big
bird bit black blue boat body book both bottom box boy bread break bright
bring brought brown build burn busy but buy by cake call came can car care
carry cat catch cause change child children city class clean clear climb
close cold color come cook cool corner could count country cover cow cried
cross cry cup cut dance dark day dear decide deep did die different dinner do
does dog done door down draw dream dress drink drive drop dry each ear early
earth easy eat egg eight either else empty end enough even evening ever every
everyone everything eye face fair fall family far farm fast fat father feed
feel feet fell felt few field find fine finger finish fire first fish five
fix floor flower fly follow food foot for forget found four free fresh friend
from front fruit full fun funny game garden gave get girl give glad glass go
goes going gold gone good got grand grass gray great green grew ground group
grow guess had hair half hand happen happy hard has hat have he head hear
heard heavy held hello help her here herself hide high hill him himself his
hold hole home hope horse hot hour house how hundred hungry hurry hurt i ice
idea if important in indeed inside into is it its itself jump just keep kept
kind king knew know lady land large last late laugh lay learn leave left leg
let letter life lift light like line lion listen little live long look lost
lot loud love low lunch made make man many may me mean meat meet men met
middle might mile milk mind mine minute miss money month moon more morning
most mother mountain mouse mouth move much music must my myself name near
neck need never new next nice night nine no noise none noon nor not note
nothing now number of off often oh old on once one only open or orange other
our out outside over own page paint pair paper part party pass past pay
people pick picture piece place plant play please pocket point poor pretty
pull push put question quick quiet quite rabbit race rain ran reach read
ready real red remember rest ride right ring river road rock roll room round
run sad said same sand sat saw say school sea seat second see seem seen self
sell send sent set seven shall she ship shoe shop short should show sick side
simple since sing sister sit six sky sleep slow small smile snow so soft some
someone something sometimes song soon sound speak spell spring stand star
start stay step still stone stop store story street strong such summer sun
sure surprise sweet table tail take talk tall tasty teach teacher tell ten
than thank that the their them then there these they thing think third this
those thought three through time tiny to today together told tomorrow too
took top touch town toy train tree tried true try turn two under until up
upon us use very visit wait walk want warm was wash watch water way we wear
week well went were wet what when where which while white who whole why will
wind window winter wish with without woman women wonder word work world would
write wrong year yellow yes yet you young your
"""

_SPACHE_SUBSET = """
a about after again all along always am an and animal another any anything
are around as ask at ate away baby back bad ball be bear because bed been
before began behind bell best better big bird black blue boat book both box
boy bring brought but by cake call came can car care carry cat catch change
child children city clean close cold color come cook could cow cried cry cup
cut dark day did do does dog done door down draw dress drink drop dry each
ear early eat egg eight end enough even ever every eye face fall far farm
fast fat father feed feel feet fell felt find fine fire first fish five fly
follow food foot for found four friend from front full fun funny game garden
gave get girl give glad go goes going gold gone good got grass green grew
ground grow had hair half hand happy hard has hat have he head hear heard
help her here hide high hill him his hold hole home hope horse hot house how
hurry hurt i ice if in into is it its jump just keep kept kind knew know land
large last late laugh learn leave left leg let letter light like line listen
little live long look lost lot loud love low lunch made make man many may me
men met milk mind mine miss money moon more morning most mother mouse mouth
move much must my name near need never new next nice night nine no noise not
now of off oh old on once one only open or other our out over own paint pair
paper part party pass pick picture place plant play please pocket pony pull
push put rabbit race rain ran reach read ready red rest ride right ring river
road rock room round run sad said same sand sat saw say school sea second see
seem seen sell send sent set seven shall she ship shoe shop short should show
sick side sing sister sit six sky sleep slow small smile snow so soft some
something sometimes song soon sound spring stand star start stay step still
stop store story street strong such summer sun surprise sweet table tail take
talk tall teach teacher tell ten than thank that the their them then there
these they thing think this those three time tiny to today together told too
took top town toy train tree tried try turn two under until up upon us use
very visit wait walk want warm was wash watch water way we week well went
were wet what when where which while white who why will wind window winter
wish with woman women word work would yellow yes yet you your
"""


def _parse(block: str) -> frozenset[str]:
    return frozenset(block.split())


DALE_CHALL_FAMILIAR = _parse(_DALE_CHALL_SUBSET)
SPACHE_FAMILIAR = _parse(_SPACHE_SUBSET)


def load_word_list(path: str | Path) -> frozenset[str]:
    """Load a newline-delimited word list; blank lines and '#' comments skipped."""
    words = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.split("#", 1)[0].strip().lower()
        if word:
            words.append(word)
    return frozenset(words)
