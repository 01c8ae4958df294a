use hilfer_core::specfn::{mittag_leffler, MLParams, MlTable};

// (alpha, beta, z, E_{alpha,beta}(z)) from 40+ digit series summation for |z| <= 20
// and Talbot inversion of s^{alpha-beta}/(s^alpha - z) beyond.
const REFERENCE: &[(f64, f64, f64, f64)] = &[
    (0.55, 0.55, -0.5, 0.28720860666652091564),
    (0.55, 0.55, -1.0, 0.15333441989756001909),
    (0.55, 0.55, -2.5, 0.040673578108260635111),
    (0.55, 0.55, -5.0, 0.011263449881053658498),
    (0.55, 0.55, -12.0, 0.0019784612599221796581),
    (0.55, 0.55, -40.0, 0.00017609726643485467743),
    (0.55, 0.55, -150.0, 0.000012449758237604051581),
    (0.55, 0.55, -1000.0, 2.7955469007701898996e-7),
    (0.55, 0.55, -20000.0, 6.986433045619685673e-10),
    (0.55, 0.55, 3.0, 7094.9689405666044382),
    (0.55, 0.55, 20.0, 1.2171135167065982789e+102),
    (0.55, 1.0, -0.5, 0.61236664961089762103),
    (0.55, 1.0, -1.0, 0.42041169867489100888),
    (0.55, 1.0, -2.5, 0.2011318366267156601),
    (0.55, 1.0, -5.0, 0.10313494422460627497),
    (0.55, 1.0, -12.0, 0.042835067290850320281),
    (0.55, 1.0, -40.0, 0.012756792114197400747),
    (0.55, 1.0, -150.0, 0.0033913820775467974919),
    (0.55, 1.0, -1000.0, 0.00050818818800577649886),
    (0.55, 1.0, -20000.0, 0.000025404977194126236163),
    (0.55, 1.0, 3.0, 2887.7136231912190058),
    (0.55, 1.0, 20.0, 1.0491848193653692633e+101),
    (0.55, 0.775, -0.5, 0.46652268136437102031),
    (0.55, 0.775, -1.0, 0.29701124940162174709),
    (0.55, 0.775, -2.5, 0.12367394465815945601),
    (0.55, 0.775, -5.0, 0.057577983422687977956),
    (0.55, 0.775, -12.0, 0.022160574358873247683),
    (0.55, 0.775, -40.0, 0.0063180136180138859337),
    (0.55, 0.775, -150.0, 0.001655637607341576721),
    (0.55, 0.775, -1000.0, 0.00024697587557101085044),
    (0.55, 0.775, -20000.0, 0.000012337274471240360058),
    (0.55, 0.775, 3.0, 4526.4503715739464264),
    (0.55, 0.775, 20.0, 3.5734815309064655363e+101),
    (0.55, 0.3, -0.5, 0.074464963528387279229),
    (0.55, 0.3, -1.0, -0.0068548481005159665271),
    (0.55, 0.3, -2.5, -0.042341955491745186785),
    (0.55, 0.3, -5.0, -0.031659594321565808465),
    (0.55, 0.3, -12.0, -0.015605955997157603832),
    (0.55, 0.3, -40.0, -0.0049861419362684220654),
    (0.55, 0.3, -150.0, -0.0013522359504773466819),
    (0.55, 0.3, -1000.0, -0.00020383763384221711299),
    (0.55, 0.3, -20000.0, -0.000010200176046310273529),
    (0.55, 0.3, 3.0, 11690.285454301081616),
    (0.55, 0.3, 20.0, 4.7501612910577353087e+102),
    (0.55, 1.4, -0.5, 0.75854793363115553323),
    (0.55, 1.4, -1.0, 0.55776194422247779561),
    (0.55, 1.4, -2.5, 0.29929746466592400792),
    (0.55, 1.4, -5.0, 0.16514061510200660872),
    (0.55, 1.4, -12.0, 0.072477748820033775247),
    (0.55, 1.4, -40.0, 0.022260201813116821043),
    (0.55, 1.4, -150.0, 0.0059776802997583546452),
    (0.55, 1.4, -1000.0, 0.00089855506829698628334),
    (0.55, 1.4, -20000.0, 0.000044943641536977365213),
    (0.55, 1.4, 3.0, 1298.5838347682062081),
    (0.55, 1.4, 20.0, 1.1875403227644338272e+100),
    (0.6, 0.6, -0.5, 0.31922307382676062617),
    (0.6, 0.6, -1.0, 0.17110228338391676025),
    (0.6, 0.6, -2.5, 0.044189420477497827366),
    (0.6, 0.6, -5.0, 0.011732767406084412348),
    (0.6, 0.6, -12.0, 0.0019791003199513285952),
    (0.6, 0.6, -40.0, 0.00017214877410680153367),
    (0.6, 0.6, -150.0, 0.0000120824271377993414),
    (0.6, 0.6, -1000.0, 2.7070034983092866776e-7),
    (0.6, 0.6, -20000.0, 6.7626206494148734585e-10),
    (0.6, 0.6, 3.0, 1778.4496950494450057),
    (0.6, 0.6, 20.0, 1.2228807842234644426e+65),
    (0.6, 0.6, 50.0, 1.1712336361550636513e+296),
    (0.6, 1.0, -0.5, 0.60947582195620002044),
    (0.6, 1.0, -1.0, 0.4133273409431062974),
    (0.6, 1.0, -2.5, 0.19091670740116979127),
    (0.6, 1.0, -5.0, 0.095117846438754616683),
    (0.6, 1.0, -12.0, 0.038643078839373570881),
    (0.6, 1.0, -40.0, 0.011375102687516281657),
    (0.6, 1.0, -150.0, 0.0030130772817564306972),
    (0.6, 1.0, -1000.0, 0.00045099581196230697017),
    (0.6, 1.0, -20000.0, 0.000022541639406445326839),
    (0.6, 1.0, 3.0, 854.85061126481007006),
    (0.6, 1.0, 20.0, 1.6597045718457832891e+64),
    (0.6, 1.0, 50.0, 8.6297232157247368726e+294),
    (0.6, 0.8, -0.5, 0.47836785666770024479),
    (0.6, 0.8, -1.0, 0.30076098217613421255),
    (0.6, 0.8, -2.5, 0.11973406071437631046),
    (0.6, 0.8, -5.0, 0.05355718369746230682),
    (0.6, 0.8, -12.0, 0.019995047010426638469),
    (0.6, 0.8, -40.0, 0.0056133250935097027188),
    (0.6, 0.8, -150.0, 0.0014641029001315739116),
    (0.6, 0.8, -1000.0, 0.00021809348576740022228),
    (0.6, 0.8, -20000.0, 0.000010891915715553100065),
    (0.6, 0.8, 3.0, 1233.0472915922356488),
    (0.6, 0.8, 20.0, 4.5051313281613009519e+64),
    (0.6, 0.8, 50.0, 3.1792172151278138696e+295),
    (0.6, 0.3, -0.5, 0.060240474476183889304),
    (0.6, 0.3, -1.0, -0.025545981582411204709),
    (0.6, 0.3, -2.5, -0.056626657963575623686),
    (0.6, 0.3, -5.0, -0.039134955606508610908),
    (0.6, 0.3, -12.0, -0.018352304216118773417),
    (0.6, 0.3, -40.0, -0.0057120624165240115004),
    (0.6, 0.3, -150.0, -0.0015364360315957068885),
    (0.6, 0.3, -1000.0, -0.00023101992947214349102),
    (0.6, 0.3, -20000.0, -0.00001155551119927799068),
    (0.6, 0.3, 3.0, 3080.4045021084932024),
    (0.6, 0.3, 20.0, 5.468889123803837736e+65),
    (0.6, 0.3, 50.0, 8.2818724647902301062e+296),
    (0.6, 1.4, -0.5, 0.76113832511393443512),
    (0.6, 1.4, -1.0, 0.55817603704853324981),
    (0.6, 1.4, -2.5, 0.29568118340411646076),
    (0.6, 1.4, -5.0, 0.16107596710544103111),
    (0.6, 1.4, -12.0, 0.06991183101785340199),
    (0.6, 1.4, -40.0, 0.021333092353278943991),
    (0.6, 1.4, -150.0, 0.0057164861088302392563),
    (0.6, 1.4, -1000.0, 0.00085871892573890006213),
    (0.6, 1.4, -20000.0, 0.000042946306365447595463),
    (0.6, 1.4, 3.0, 410.72945152433699378),
    (0.6, 1.4, 20.0, 2.252565664080650476e+63),
    (0.6, 1.4, 50.0, 6.3584344302556277391e+293),
    (0.75, 0.75, -0.5, 0.42184231246858204849),
    (0.75, 0.75, -1.0, 0.23223772010096143194),
    (0.75, 0.75, -2.5, 0.055222034307775473183),
    (0.75, 0.75, -5.0, 0.012140520971468211535),
    (0.75, 0.75, -12.0, 0.0017072910312744580989),
    (0.75, 0.75, -40.0, 0.00013612330377760571833),
    (0.75, 0.75, -150.0, 9.3203639543309896194e-6),
    (0.75, 0.75, -1000.0, 2.0728546309097819553e-7),
    (0.75, 0.75, -20000.0, 5.1720726416625257263e-10),
    (0.75, 0.75, 3.0, 145.57961543706038234),
    (0.75, 0.75, 20.0, 1.3669330723191510478e+24),
    (0.75, 0.75, 50.0, 4.8864068281688964894e+80),
    (0.75, 1.0, -0.5, 0.60379034509524675559),
    (0.75, 1.0, -1.0, 0.39310830281575406177),
    (0.75, 1.0, -2.5, 0.15642695861194744289),
    (0.75, 1.0, -5.0, 0.067923974332643942122),
    (0.75, 1.0, -12.0, 0.025085777706384877714),
    (0.75, 1.0, -40.0, 0.0070756747558264278336),
    (0.75, 1.0, -150.0, 0.0018513841784833034538),
    (0.75, 1.0, -1000.0, 0.00027609801263627742813),
    (0.75, 1.0, -20000.0, 0.000013791488410366811786),
    (0.75, 1.0, 3.0, 100.86180177510028035),
    (0.75, 1.0, 20.0, 5.0358244949570299991e+23),
    (0.75, 1.0, 50.0, 1.3263748776231293187e+80),
    (0.75, 0.875, -0.5, 0.51928757622682003444),
    (0.75, 0.875, -1.0, 0.31680117048173463167),
    (0.75, 0.875, -2.5, 0.10672640185634954056),
    (0.75, 0.875, -5.0, 0.039853880370369990117),
    (0.75, 0.875, -12.0, 0.013109046587606442736),
    (0.75, 0.875, -40.0, 0.0034888226895241022714),
    (0.75, 0.875, -150.0, 0.00089670976261560279347),
    (0.75, 0.875, -1000.0, 0.00013299666984184569771),
    (0.75, 0.875, -20000.0, 6.6372914849616650137e-6),
    (0.75, 0.875, 3.0, 121.18631855634349733),
    (0.75, 0.875, 20.0, 8.2967674720650392521e+23),
    (0.75, 0.875, 50.0, 2.5458215292375354516e+80),
    (0.75, 0.3, -0.5, 0.017511126690734606067),
    (0.75, 0.3, -1.0, -0.086533302996038632987),
    (0.75, 0.3, -2.5, -0.10407186930987130851),
    (0.75, 0.3, -5.0, -0.060458308173160539792),
    (0.75, 0.3, -12.0, -0.024513126866122647277),
    (0.75, 0.3, -40.0, -0.0070879979580838815119),
    (0.75, 0.3, -150.0, -0.0018654245330409924982),
    (0.75, 0.3, -1000.0, -0.00027864998314443875397),
    (0.75, 0.3, -20000.0, -0.000013922712074472779197),
    (0.75, 0.3, 3.0, 281.47899714874764276),
    (0.75, 0.3, 20.0, 8.2483151986291993448e+24),
    (0.75, 0.3, 50.0, 5.1094202495854674571e+81),
    (0.75, 1.4, -0.5, 0.7713914142110360515),
    (0.75, 1.4, -1.0, 0.56150105598660994816),
    (0.75, 1.4, -2.5, 0.28311091459982850629),
    (0.75, 1.4, -5.0, 0.14617725293945740574),
    (0.75, 1.4, -12.0, 0.060723955339413951823),
    (0.75, 1.4, -40.0, 0.018109386303938446929),
    (0.75, 1.4, -150.0, 0.0048183076148081734115),
    (0.75, 1.4, -1000.0, 0.00072222193368731237297),
    (0.75, 1.4, -20000.0, 0.000036106658572534702766),
    (0.75, 1.4, 3.0, 55.948473613969042943),
    (0.75, 1.4, 20.0, 1.0190322335356139554e+23),
    (0.75, 1.4, 50.0, 1.6464515368839816852e+79),
    (0.9, 0.9, -0.5, 0.53190235156843732495),
    (0.9, 0.9, -1.0, 0.30814879777662194201),
    (0.9, 0.9, -2.5, 0.068873030246501647936),
    (0.9, 0.9, -5.0, 0.010212790452992133754),
    (0.9, 0.9, -12.0, 0.00091508415994729330783),
    (0.9, 0.9, -40.0, 0.000064491183205842518842),
    (0.9, 0.9, -150.0, 4.2996630116737335068e-6),
    (0.9, 0.9, -1000.0, 9.4917076469339176804e-8),
    (0.9, 0.9, -20000.0, 2.3654504156818899395e-10),
    (0.9, 0.9, 3.0, 37.227740541104382002),
    (0.9, 0.9, 20.0, 2026305978798.5578075),
    (0.9, 0.9, 50.0, 5.9140265868508829615e+33),
    (0.9, 1.0, -0.5, 0.60340549869586096762),
    (0.9, 1.0, -1.0, 0.37606602142464188118),
    (0.9, 1.0, -2.5, 0.11469986754557785185),
    (0.9, 1.0, -5.0, 0.034431324804098423905),
    (0.9, 1.0, -12.0, 0.010275288049933647198),
    (0.9, 1.0, -40.0, 0.0027434496977921001153),
    (0.9, 1.0, -150.0, 0.0007086230236468583464),
    (0.9, 1.0, -1000.0, 0.00010528835943209591488),
    (0.9, 1.0, -20000.0, 5.2561207300574183305e-6),
    (0.9, 1.0, 3.0, 32.921897176850828949),
    (0.9, 1.0, 20.0, 1452600326526.7420735),
    (0.9, 1.0, 50.0, 3.8292068545927546561e+33),
    (0.9, 0.95, -0.5, 0.56885402063987122098),
    (0.9, 0.95, -1.0, 0.34293505252280934994),
    (0.9, 0.95, -2.5, 0.091967399189611568974),
    (0.9, 0.95, -5.0, 0.022244924441003506377),
    (0.9, 0.95, -12.0, 0.0055155618863043810167),
    (0.9, 0.95, -40.0, 0.0013755621366061070887),
    (0.9, 0.95, -150.0, 0.00034858847261373633117),
    (0.9, 0.95, -1000.0, 0.00005149785634548446212),
    (0.9, 0.95, -20000.0, 2.5683838333213293935e-6),
    (0.9, 0.95, 3.0, 35.010093864856849925),
    (0.9, 0.95, 20.0, 1715637702560.1519924),
    (0.9, 0.95, 50.0, 4.7587846289376444219e+33),
    (0.9, 0.3, -0.5, -0.023657932309857732786),
    (0.9, 0.3, -1.0, -0.15528505157518681881),
    (0.9, 0.3, -2.5, -0.16357727516592816792),
    (0.9, 0.3, -5.0, -0.079149673577254657997),
    (0.9, 0.3, -12.0, -0.026137212469682122622),
    (0.9, 0.3, -40.0, -0.0070418821039643037956),
    (0.9, 0.3, -150.0, -0.0018223751104433057974),
    (0.9, 0.3, -1000.0, -0.00027091856649351098381),
    (0.9, 0.3, -20000.0, -0.000013525783944128573805),
    (0.9, 0.3, 3.0, 77.488250244075801564),
    (0.9, 0.3, 20.0, 14929950103554.463808),
    (0.9, 0.3, 50.0, 8.0265689761793419783e+34),
    (0.9, 1.4, -0.5, 0.78561861616016037826),
    (0.9, 1.4, -1.0, 0.5692068318626082254),
    (0.9, 1.4, -2.5, 0.26807377578744076609),
    (0.9, 1.4, -5.0, 0.12610717198029134298),
    (0.9, 1.4, -12.0, 0.049078719223711393928),
    (0.9, 1.4, -40.0, 0.014277493975838971835),
    (0.9, 1.4, -150.0, 0.0037732916832097208772),
    (0.9, 1.4, -1000.0, 0.00056445848644036367149),
    (0.9, 1.4, -20000.0, 0.000028210150719919271336),
    (0.9, 1.4, 3.0, 20.052438993958042062),
    (0.9, 1.4, 20.0, 383628252768.57941704),
    (0.9, 1.4, 50.0, 6.7299377626562333771e+32),
    (0.99, 0.99, -0.5, 0.59910754973579932754),
    (0.99, 0.99, -1.0, 0.36159131535572008744),
    (0.99, 0.99, -2.5, 0.080520129328761449459),
    (0.99, 0.99, -5.0, 0.0071895423030289530632),
    (0.99, 0.99, -12.0, 0.00011319814964261368301),
    (0.99, 0.99, -40.0, 6.9140852218688714645e-6),
    (0.99, 0.99, -150.0, 4.5449358574239328476e-7),
    (0.99, 0.99, -1000.0, 9.9959144665478066134e-9),
    (0.99, 0.99, -20000.0, 2.4896143389893190084e-11),
    (0.99, 0.99, 3.0, 21.213694630976346687),
    (0.99, 0.99, 20.0, 933786504.58576388555),
    (0.99, 0.99, 50.0, 4.087848572151087814e+22),
    (0.99, 1.0, -0.5, 0.60608995263141647835),
    (0.99, 1.0, -1.0, 0.36854831806033961629),
    (0.99, 1.0, -2.5, 0.085522799596113514937),
    (0.99, 1.0, -5.0, 0.0097680921391741255086),
    (0.99, 1.0, -12.0, 0.0010348294476381971842),
    (0.99, 1.0, -40.0, 0.00026482722935744475131),
    (0.99, 1.0, -150.0, 0.000067945775406225942002),
    (0.99, 1.0, -1000.0, 0.00001007694492000442879),
    (0.99, 1.0, -20000.0, 5.029028243383168749e-7),
    (0.99, 1.0, 3.0, 20.976948519286249038),
    (0.99, 1.0, 20.0, 905953434.86913872968),
    (0.99, 1.0, 50.0, 3.9294655579286948684e+22),
    (0.99, 0.995, -0.5, 0.60261169845446206998),
    (0.99, 0.995, -1.0, 0.36507926159749777197),
    (0.99, 0.995, -2.5, 0.083023758315232561907),
    (0.99, 0.995, -5.0, 0.0084776829631948742168),
    (0.99, 0.995, -12.0, 0.00057296078762732367138),
    (0.99, 0.995, -40.0, 0.00013552437548413787782),
    (0.99, 0.995, -150.0, 0.000034106118363865476585),
    (0.99, 0.995, -1000.0, 5.0292981413589321002e-6),
    (0.99, 0.995, -20000.0, 2.5075467701745078773e-7),
    (0.99, 0.995, 3.0, 21.095002068915366303),
    (0.99, 0.995, 20.0, 919764693.42105518548),
    (0.99, 0.995, 50.0, 4.0078747697870617171e+22),
    (0.99, 0.3, -0.5, -0.046441172224842487166),
    (0.99, 0.3, -1.0, -0.19957747133129195645),
    (0.99, 0.3, -2.5, -0.20960045263094935648),
    (0.99, 0.3, -5.0, -0.088662160436080112532),
    (0.99, 0.3, -12.0, -0.02374049742114193533),
    (0.99, 0.3, -40.0, -0.006242598371153560328),
    (0.99, 0.3, -150.0, -0.0016100065857088134076),
    (0.99, 0.3, -1000.0, -0.00023913629335885469161),
    (0.99, 0.3, -20000.0, -0.000011937349974854015069),
    (0.99, 0.3, 3.0, 45.672885180504436361),
    (0.99, 0.3, 20.0, 7534007962.9660799691),
    (0.99, 0.3, 50.0, 6.2463369617681963115e+23),
    (0.99, 1.4, -0.5, 0.79609507489511906393),
    (0.99, 1.4, -1.0, 0.57665635756999601583),
    (0.99, 1.4, -2.5, 0.25827366342445786304),
    (0.99, 1.4, -5.0, 0.11063213472589278499),
    (0.99, 1.4, -12.0, 0.040771259888864225903),
    (0.99, 1.4, -40.0, 0.011737906887646766122),
    (0.99, 1.4, -150.0, 0.0030947118543936847531),
    (0.99, 1.4, -1000.0, 0.0004626301859977754809),
    (0.99, 1.4, -20000.0, 0.000023118433006252594439),
    (0.99, 1.4, 3.0, 13.326044877240490575),
    (0.99, 1.4, 20.0, 270045653.04153899177),
    (0.99, 1.4, 50.0, 8.0887415566506796923e+21),
];

#[test]
fn matches_high_precision_reference() {
    let mut worst = 0.0f64;
    for &(alpha, beta, z, want) in REFERENCE {
        let got = mittag_leffler(MLParams::new(alpha, beta).unwrap(), z).unwrap();
        let rel = ((got - want) / want).abs();
        worst = worst.max(rel);
        assert!(rel <= 1e-10, "E_({alpha},{beta})({z}) = {got}, want {want}, rel {rel:e}");
    }
    assert!(worst < 1e-10);
}

#[test]
fn table_matches_reference_on_negative_axis() {
    for &(alpha, beta, z, want) in REFERENCE.iter().filter(|r| r.2 < 0.0) {
        let table = MlTable::new(alpha, beta, 2.0e4).unwrap();
        let got = table.eval_neg(-z).unwrap();
        assert!(((got - want) / want).abs() <= 1e-10, "table E_({alpha},{beta})({z}) = {got}, want {want}");
    }
}
